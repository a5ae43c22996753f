#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "focusst/core.hpp"
#include "focusst/types.hpp"

namespace focusst {

// A single tagged value transmitted on a channel. Payload always conforms to
// the carried type; the factories reject anything else. Immutable once built.
class Message {
public:
    struct RecordValue {
        Nat variant = 0;
        std::vector<Message> fields;
    };

    static Message nat(Nat value) { return Message(MessageType::nat(), value); }

    static Message boolean(bool value) { return Message(MessageType::boolean(), value); }

    static Message bit(Nat value) {
        if (value > 1)
            throw TypeError("bit payload must be 0 or 1, got " + std::to_string(value));
        return Message(MessageType::bit(), BitValue{static_cast<std::uint8_t>(value)});
    }

    static Message enumerated(const MessageType& type, const std::string& constructor) {
        auto idx = type.constructor_index(constructor);
        if (!idx)
            throw TypeError("'" + constructor + "' is not a constructor of " + type.to_string());
        return Message(type, EnumValue{*idx});
    }

    static Message enumerated_by_index(const MessageType& type, Nat index) {
        if (type.kind() != MessageType::Kind::Enumeration || index >= type.constructors().size())
            throw TypeError("enumeration index out of range for " + type.to_string());
        return Message(type, EnumValue{index});
    }

    static Message list(const MessageType& element_type, std::vector<Message> elements) {
        for (const auto& m : elements)
            if (m.type() != element_type)
                throw TypeError("list element of type " + m.type().to_string() + " in List(" +
                                element_type.to_string() + ")");
        return Message(MessageType::list(element_type), std::move(elements));
    }

    static Message record(const MessageType& type, const std::string& constructor, std::vector<Message> fields) {
        auto idx = type.variant_index(constructor);
        if (!idx)
            throw TypeError("'" + constructor + "' is not a constructor of " + type.to_string());
        const auto& variant = type.variants()[*idx];
        if (variant.fields.size() != fields.size())
            throw TypeError("constructor '" + constructor + "' of " + type.to_string() + " takes " +
                            std::to_string(variant.fields.size()) + " fields, got " +
                            std::to_string(fields.size()));
        for (size_t i = 0; i < fields.size(); ++i)
            if (fields[i].type() != variant.fields[i].field_type())
                throw TypeError("field '" + variant.fields[i].selector + "' of '" + constructor +
                                "' expects " + variant.fields[i].field_type().to_string());
        return Message(type, RecordValue{*idx, std::move(fields)});
    }

    const MessageType& type() const { return type_; }

    Nat nat_value() const { return std::get<Nat>(payload_); }
    bool bool_value() const { return std::get<bool>(payload_); }
    Nat bit_value() const { return std::get<BitValue>(payload_).value; }

    Nat enum_index() const { return std::get<EnumValue>(payload_).index; }
    const std::string& constructor() const {
        if (type_.kind() == MessageType::Kind::Enumeration)
            return type_.constructors()[enum_index()];
        const auto& rec = std::get<RecordValue>(payload_);
        return type_.variants()[rec.variant].constructor;
    }

    const std::vector<Message>& list_elements() const { return std::get<std::vector<Message>>(payload_); }
    std::vector<Message> into_list() && { return std::get<std::vector<Message>>(std::move(payload_)); }
    const RecordValue& record_value() const { return std::get<RecordValue>(payload_); }

    bool operator==(const Message& other) const {
        if (type_ != other.type_)
            return false;
        switch (type_.kind()) {
        case MessageType::Kind::Nat: return nat_value() == other.nat_value();
        case MessageType::Kind::Bool: return bool_value() == other.bool_value();
        case MessageType::Kind::Bit: return bit_value() == other.bit_value();
        case MessageType::Kind::Enumeration: return enum_index() == other.enum_index();
        case MessageType::Kind::List: return list_elements() == other.list_elements();
        case MessageType::Kind::Record: {
            const auto& a = record_value();
            const auto& b = other.record_value();
            return a.variant == b.variant && a.fields == b.fields;
        }
        }
        return false;
    }
    bool operator!=(const Message& other) const { return !(*this == other); }

    std::string to_string() const {
        switch (type_.kind()) {
        case MessageType::Kind::Nat: return std::to_string(nat_value());
        case MessageType::Kind::Bool: return bool_value() ? "true" : "false";
        case MessageType::Kind::Bit: return std::to_string(bit_value());
        case MessageType::Kind::Enumeration: return constructor();
        case MessageType::Kind::List: {
            std::string out = "<";
            const auto& xs = list_elements();
            for (size_t i = 0; i < xs.size(); ++i) {
                if (i)
                    out += ", ";
                out += xs[i].to_string();
            }
            return out + ">";
        }
        case MessageType::Kind::Record: {
            const auto& rec = record_value();
            std::string out = constructor() + "(";
            for (size_t i = 0; i < rec.fields.size(); ++i) {
                if (i)
                    out += ", ";
                out += rec.fields[i].to_string();
            }
            return out + ")";
        }
        }
        return "?";
    }

private:
    struct BitValue {
        std::uint8_t value;
    };
    struct EnumValue {
        Nat index;
    };
    using Payload = std::variant<Nat, bool, BitValue, EnumValue, std::vector<Message>, RecordValue>;

    Message(MessageType type, Payload payload) : type_(std::move(type)), payload_(std::move(payload)) {}

    MessageType type_;
    Payload payload_;
};

}  // namespace focusst
