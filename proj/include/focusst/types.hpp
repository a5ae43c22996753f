#pragma once

#include <memory>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "focusst/core.hpp"

namespace focusst {

class MessageType;

struct RecordField {
    std::string selector;
    // Defined below; MessageType is a shared handle, so holding it by value
    // here is fine once the class is complete.
    std::shared_ptr<const MessageType> type;

    const MessageType& field_type() const { return *type; }
};

struct RecordVariant {
    std::string constructor;
    std::vector<RecordField> fields;
};

namespace detail {
struct TypeNode;
}

// A channel/variable type: Nat, Bool, Bit, a named enumeration, a list type,
// or a named record type with constructors and selectors. Values are handles
// to immutable shared nodes; equality is structural.
class MessageType {
public:
    enum class Kind { Nat, Bool, Bit, Enumeration, List, Record };

    MessageType() : MessageType(nat()) {}

    static MessageType nat();
    static MessageType boolean();
    static MessageType bit();
    static MessageType enumeration(std::string name, std::vector<std::string> constructors);
    static MessageType list(const MessageType& element);
    static MessageType record(std::string name, std::vector<RecordVariant> variants);

    Kind kind() const;
    const std::string& name() const;                         // enumeration/record
    const std::vector<std::string>& constructors() const;    // enumeration
    const MessageType& element() const;                      // list
    const std::vector<RecordVariant>& variants() const;      // record

    std::optional<Nat> constructor_index(const std::string& ctor) const;
    std::optional<Nat> variant_index(const std::string& ctor) const;

    bool operator==(const MessageType& other) const;
    bool operator!=(const MessageType& other) const { return !(*this == other); }

    std::string to_string() const;

private:
    explicit MessageType(std::shared_ptr<const detail::TypeNode> node) : node_(std::move(node)) {}
    std::shared_ptr<const detail::TypeNode> node_;
};

namespace detail {

struct TypeNode {
    MessageType::Kind kind = MessageType::Kind::Nat;
    std::string name;                        // enumeration/record
    std::vector<std::string> constructors;   // enumeration
    std::shared_ptr<const MessageType> element;  // list
    std::vector<RecordVariant> variants;     // record
};

inline const std::shared_ptr<const TypeNode>& builtin_node(MessageType::Kind kind) {
    static const auto nat = std::make_shared<const TypeNode>(TypeNode{MessageType::Kind::Nat, {}, {}, nullptr, {}});
    static const auto boolean =
        std::make_shared<const TypeNode>(TypeNode{MessageType::Kind::Bool, {}, {}, nullptr, {}});
    static const auto bit = std::make_shared<const TypeNode>(TypeNode{MessageType::Kind::Bit, {}, {}, nullptr, {}});
    switch (kind) {
    case MessageType::Kind::Bool: return boolean;
    case MessageType::Kind::Bit: return bit;
    default: return nat;
    }
}

}  // namespace detail

inline MessageType MessageType::nat() { return MessageType(detail::builtin_node(Kind::Nat)); }
inline MessageType MessageType::boolean() { return MessageType(detail::builtin_node(Kind::Bool)); }
inline MessageType MessageType::bit() { return MessageType(detail::builtin_node(Kind::Bit)); }

inline MessageType MessageType::enumeration(std::string name, std::vector<std::string> constructors) {
    if (constructors.empty())
        throw TypeError("enumeration '" + name + "' needs at least one constructor");
    std::unordered_set<std::string> seen;
    for (const auto& c : constructors)
        if (!seen.insert(c).second)
            throw TypeError("enumeration '" + name + "' repeats constructor '" + c + "'");
    auto node = std::make_shared<detail::TypeNode>();
    node->kind = Kind::Enumeration;
    node->name = std::move(name);
    node->constructors = std::move(constructors);
    return MessageType(std::move(node));
}

inline MessageType MessageType::list(const MessageType& element) {
    auto node = std::make_shared<detail::TypeNode>();
    node->kind = Kind::List;
    node->element = std::make_shared<const MessageType>(element);
    return MessageType(std::move(node));
}

inline MessageType MessageType::record(std::string name, std::vector<RecordVariant> variants) {
    if (variants.empty())
        throw TypeError("record '" + name + "' needs at least one variant");
    std::unordered_set<std::string> ctors;
    for (const auto& v : variants) {
        if (!ctors.insert(v.constructor).second)
            throw TypeError("record '" + name + "' repeats constructor '" + v.constructor + "'");
        std::unordered_set<std::string> sels;
        for (const auto& f : v.fields)
            if (!sels.insert(f.selector).second)
                throw TypeError("record '" + name + "' variant '" + v.constructor + "' repeats selector '" +
                                f.selector + "'");
    }
    auto node = std::make_shared<detail::TypeNode>();
    node->kind = Kind::Record;
    node->name = std::move(name);
    node->variants = std::move(variants);
    return MessageType(std::move(node));
}

inline MessageType::Kind MessageType::kind() const { return node_->kind; }

inline const std::string& MessageType::name() const { return node_->name; }

inline const std::vector<std::string>& MessageType::constructors() const {
    if (node_->kind != Kind::Enumeration)
        throw TypeError("constructors() on non-enumeration type");
    return node_->constructors;
}

inline const MessageType& MessageType::element() const {
    if (node_->kind != Kind::List)
        throw TypeError("element() on non-list type");
    return *node_->element;
}

inline const std::vector<RecordVariant>& MessageType::variants() const {
    if (node_->kind != Kind::Record)
        throw TypeError("variants() on non-record type");
    return node_->variants;
}

inline std::optional<Nat> MessageType::constructor_index(const std::string& ctor) const {
    if (node_->kind != Kind::Enumeration)
        return std::nullopt;
    for (Nat i = 0; i < node_->constructors.size(); ++i)
        if (node_->constructors[i] == ctor)
            return i;
    return std::nullopt;
}

inline std::optional<Nat> MessageType::variant_index(const std::string& ctor) const {
    if (node_->kind != Kind::Record)
        return std::nullopt;
    for (Nat i = 0; i < node_->variants.size(); ++i)
        if (node_->variants[i].constructor == ctor)
            return i;
    return std::nullopt;
}

inline bool MessageType::operator==(const MessageType& other) const {
    if (node_ == other.node_)
        return true;
    if (node_->kind != other.node_->kind)
        return false;
    switch (node_->kind) {
    case Kind::Nat:
    case Kind::Bool:
    case Kind::Bit:
        return true;
    case Kind::Enumeration:
        return node_->name == other.node_->name && node_->constructors == other.node_->constructors;
    case Kind::List:
        return *node_->element == *other.node_->element;
    case Kind::Record: {
        if (node_->name != other.node_->name || node_->variants.size() != other.node_->variants.size())
            return false;
        for (size_t i = 0; i < node_->variants.size(); ++i) {
            const auto& a = node_->variants[i];
            const auto& b = other.node_->variants[i];
            if (a.constructor != b.constructor || a.fields.size() != b.fields.size())
                return false;
            for (size_t j = 0; j < a.fields.size(); ++j)
                if (a.fields[j].selector != b.fields[j].selector ||
                    a.fields[j].field_type() != b.fields[j].field_type())
                    return false;
        }
        return true;
    }
    }
    return false;
}

inline std::string MessageType::to_string() const {
    switch (node_->kind) {
    case Kind::Nat: return "Nat";
    case Kind::Bool: return "Bool";
    case Kind::Bit: return "Bit";
    case Kind::Enumeration: return node_->name;
    case Kind::List: return "List(" + node_->element->to_string() + ")";
    case Kind::Record: return node_->name;
    }
    return "?";
}

inline RecordField make_field(std::string selector, const MessageType& type) {
    return RecordField{std::move(selector), std::make_shared<const MessageType>(type)};
}

}  // namespace focusst
