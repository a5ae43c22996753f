#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "focusst/diagnostics.hpp"
#include "focusst/message.hpp"
#include "focusst/stream.hpp"
#include "focusst/types.hpp"

namespace focusst {

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

struct Expr;
using ExprPtr = std::shared_ptr<Expr>;

enum class BinOp { Add, Sub, Lt, Le, Eq, Ge, Gt, Ne, And, Or, Implies };

inline const char* to_string(BinOp op) {
    switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Eq: return "=";
    case BinOp::Ge: return ">=";
    case BinOp::Gt: return ">";
    case BinOp::Ne: return "/=";
    case BinOp::And: return "and";
    case BinOp::Or: return "or";
    case BinOp::Implies: return "->";
    }
    return "?";
}

struct NumLit {
    Nat value = 0;
};

struct BoolLit {
    bool value = false;
};

// An enumeration constructor used as a literal; the owning type and the
// constructor's index are resolved during validation.
struct CtorLit {
    std::string constructor;
    std::optional<Nat> resolved_index;
};

enum class VarKind { Unresolved, Local, Choice };

struct VarRead {
    std::string name;
    VarKind kind = VarKind::Unresolved;
    Nat resolved_index = 0;  // into locals or the rule's choices; set by validation
};

// ti(channel, t) for the implicit current step; written channel[t].
struct IntervalRead {
    std::string channel;
    std::optional<Nat> resolved_slot;  // position among the spec's inputs
};

struct FtExpr {
    ExprPtr arg;
};

struct ListExpr {
    std::vector<ExprPtr> elements;
};

struct NotExpr {
    ExprPtr arg;
};

struct BinExpr {
    BinOp op;
    ExprPtr lhs;
    ExprPtr rhs;
};

struct IfExpr {
    ExprPtr cond;
    ExprPtr then_branch;
    ExprPtr else_branch;
};

struct Expr {
    using Node = std::variant<NumLit, BoolLit, CtorLit, VarRead, IntervalRead, FtExpr, ListExpr, NotExpr,
                              BinExpr, IfExpr>;

    Node node;
    SourceSpan span;
    // Filled by validation; evaluation relies on it for literal typing.
    std::optional<MessageType> resolved_type;
};

inline ExprPtr make_expr(Expr::Node node, SourceSpan span = {}) {
    auto e = std::make_shared<Expr>();
    e->node = std::move(node);
    e->span = std::move(span);
    return e;
}

// Structural equality on the surface content; spans and resolved annotations
// are ignored.
inline bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
    if (!a || !b)
        return static_cast<bool>(a) == static_cast<bool>(b);
    if (a->node.index() != b->node.index())
        return false;
    return std::visit(
        [&](const auto& lhs) -> bool {
            using T = std::decay_t<decltype(lhs)>;
            const auto& rhs = std::get<T>(b->node);
            if constexpr (std::is_same_v<T, NumLit>) {
                return lhs.value == rhs.value;
            } else if constexpr (std::is_same_v<T, BoolLit>) {
                return lhs.value == rhs.value;
            } else if constexpr (std::is_same_v<T, CtorLit>) {
                return lhs.constructor == rhs.constructor;
            } else if constexpr (std::is_same_v<T, VarRead>) {
                return lhs.name == rhs.name;
            } else if constexpr (std::is_same_v<T, IntervalRead>) {
                return lhs.channel == rhs.channel;
            } else if constexpr (std::is_same_v<T, FtExpr>) {
                return expr_equal(lhs.arg, rhs.arg);
            } else if constexpr (std::is_same_v<T, ListExpr>) {
                if (lhs.elements.size() != rhs.elements.size())
                    return false;
                for (size_t i = 0; i < lhs.elements.size(); ++i)
                    if (!expr_equal(lhs.elements[i], rhs.elements[i]))
                        return false;
                return true;
            } else if constexpr (std::is_same_v<T, NotExpr>) {
                return expr_equal(lhs.arg, rhs.arg);
            } else if constexpr (std::is_same_v<T, BinExpr>) {
                return lhs.op == rhs.op && expr_equal(lhs.lhs, rhs.lhs) && expr_equal(lhs.rhs, rhs.rhs);
            } else if constexpr (std::is_same_v<T, IfExpr>) {
                return expr_equal(lhs.cond, rhs.cond) && expr_equal(lhs.then_branch, rhs.then_branch) &&
                       expr_equal(lhs.else_branch, rhs.else_branch);
            }
        },
        a->node);
}

// ---------------------------------------------------------------------------
// Effects (right-hand sides of transition rules)
// ---------------------------------------------------------------------------

enum class AssignTargetKind { Local, Output };

// Surface form of the output interval index, kept for faithful printing:
// `y = …`, `y[t] = …` (weakly causal), or `y[t+1] = …` (strongly causal).
enum class OutIndexForm { None, Cur, Next };

struct Assignment {
    AssignTargetKind target_kind = AssignTargetKind::Local;
    std::string target;
    OutIndexForm index_form = OutIndexForm::None;
    ExprPtr value;
    SourceSpan span;
};

struct EffectItem;

struct EffectBlock {
    std::vector<EffectItem> items;
};

struct IfEffect {
    ExprPtr cond;
    EffectBlock then_branch;
    EffectBlock else_branch;
};

struct EffectItem {
    std::variant<Assignment, IfEffect> node;
};

inline bool effect_equal(const EffectBlock& a, const EffectBlock& b);

inline bool effect_item_equal(const EffectItem& a, const EffectItem& b) {
    if (a.node.index() != b.node.index())
        return false;
    if (std::holds_alternative<Assignment>(a.node)) {
        const auto& x = std::get<Assignment>(a.node);
        const auto& y = std::get<Assignment>(b.node);
        return x.target_kind == y.target_kind && x.target == y.target && x.index_form == y.index_form &&
               expr_equal(x.value, y.value);
    }
    const auto& x = std::get<IfEffect>(a.node);
    const auto& y = std::get<IfEffect>(b.node);
    return expr_equal(x.cond, y.cond) && effect_equal(x.then_branch, y.then_branch) &&
           effect_equal(x.else_branch, y.else_branch);
}

inline bool effect_equal(const EffectBlock& a, const EffectBlock& b) {
    if (a.items.size() != b.items.size())
        return false;
    for (size_t i = 0; i < a.items.size(); ++i)
        if (!effect_item_equal(a.items[i], b.items[i]))
            return false;
    return true;
}

// choose v in lo..hi — an existential witness drawn at runtime.
struct ChooseBinding {
    std::string var;
    Nat lo = 0;
    Nat hi = 0;
    SourceSpan span;

    bool operator==(const ChooseBinding& other) const {
        return var == other.var && lo == other.lo && hi == other.hi;
    }
};

// ---------------------------------------------------------------------------
// Monitor predicates (assumptions and monitor-only guarantees)
// ---------------------------------------------------------------------------

struct TsPred {
    std::string channel;
};

struct MsgPred {
    std::string channel;
    Nat bound = 1;
};

struct TruePred {};

// A per-interval predicate over a single channel (e.g. a value range).
struct IntervalPred {
    std::string channel;
    ExprPtr predicate;
};

// Pointwise stream equality between two channels of one component.
struct StreamEqPred {
    std::string left;
    std::string right;
};

struct MonitorPred {
    std::variant<TsPred, MsgPred, TruePred, IntervalPred, StreamEqPred> node;
};

inline bool pred_equal(const MonitorPred& a, const MonitorPred& b) {
    if (a.node.index() != b.node.index())
        return false;
    return std::visit(
        [&](const auto& lhs) -> bool {
            using T = std::decay_t<decltype(lhs)>;
            const auto& rhs = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, TsPred>) {
                return lhs.channel == rhs.channel;
            } else if constexpr (std::is_same_v<T, MsgPred>) {
                return lhs.channel == rhs.channel && lhs.bound == rhs.bound;
            } else if constexpr (std::is_same_v<T, TruePred>) {
                return true;
            } else if constexpr (std::is_same_v<T, IntervalPred>) {
                return lhs.channel == rhs.channel && expr_equal(lhs.predicate, rhs.predicate);
            } else if constexpr (std::is_same_v<T, StreamEqPred>) {
                return lhs.left == rhs.left && lhs.right == rhs.right;
            }
        },
        a.node);
}

// ---------------------------------------------------------------------------
// Component specifications
// ---------------------------------------------------------------------------

enum class Polarity { In, Out };

enum class Causality { StronglyCausal, WeaklyCausal };

struct ChannelDecl {
    std::string name;
    MessageType type;
    Polarity polarity = Polarity::In;
    SourceSpan span;
};

struct LocalVarDecl {
    std::string name;
    MessageType type;
    ExprPtr init;  // literal expression; frozen to a Message by validation
    std::optional<Message> init_value;
    SourceSpan span;
};

struct LabeledPred {
    std::string label;
    MonitorPred pred;
    SourceSpan span;
};

// I-labelled output-interval equation for step 0 of a delayed output.
struct InitialGuarantee {
    std::string label;
    std::string channel;
    std::vector<ExprPtr> elements;  // literal expressions
    std::optional<TimeInterval> value;  // frozen by validation
    SourceSpan span;
};

struct TransitionRule {
    std::string label;
    std::vector<ChooseBinding> choices;
    ExprPtr guard;  // null = unguarded (fires unless another rule precedes it)
    EffectBlock effect;
    SourceSpan span;
};

// One item of the gar section, in source order: an initial guarantee, a
// monitor-only predicate, or a transition rule.
struct GarItem {
    std::variant<InitialGuarantee, LabeledPred, TransitionRule> node;

    const std::string& label() const {
        return std::visit([](const auto& x) -> const std::string& { return x.label; }, node);
    }
};

struct ComponentSpec {
    std::string name;
    Causality causality = Causality::StronglyCausal;
    std::vector<ChannelDecl> channels;
    std::vector<LocalVarDecl> locals;
    std::vector<LabeledPred> assumptions;
    std::vector<GarItem> guarantees;
    SourceSpan span;

    const ChannelDecl* find_channel(const std::string& name) const {
        for (const auto& c : channels)
            if (c.name == name)
                return &c;
        return nullptr;
    }

    const LocalVarDecl* find_local(const std::string& name) const {
        for (const auto& l : locals)
            if (l.name == name)
                return &l;
        return nullptr;
    }

    std::vector<const ChannelDecl*> inputs() const {
        std::vector<const ChannelDecl*> out;
        for (const auto& c : channels)
            if (c.polarity == Polarity::In)
                out.push_back(&c);
        return out;
    }

    std::vector<const ChannelDecl*> outputs() const {
        std::vector<const ChannelDecl*> out;
        for (const auto& c : channels)
            if (c.polarity == Polarity::Out)
                out.push_back(&c);
        return out;
    }

    std::vector<const InitialGuarantee*> initial_guarantees() const {
        std::vector<const InitialGuarantee*> out;
        for (const auto& g : guarantees)
            if (const auto* ig = std::get_if<InitialGuarantee>(&g.node))
                out.push_back(ig);
        return out;
    }

    std::vector<const TransitionRule*> rules() const {
        std::vector<const TransitionRule*> out;
        for (const auto& g : guarantees)
            if (const auto* r = std::get_if<TransitionRule>(&g.node))
                out.push_back(r);
        return out;
    }

    std::vector<const LabeledPred*> guarantee_preds() const {
        std::vector<const LabeledPred*> out;
        for (const auto& g : guarantees)
            if (const auto* p = std::get_if<LabeledPred>(&g.node))
                out.push_back(p);
        return out;
    }
};

inline bool spec_equal(const ComponentSpec& a, const ComponentSpec& b) {
    if (a.name != b.name || a.causality != b.causality || a.channels.size() != b.channels.size() ||
        a.locals.size() != b.locals.size() || a.assumptions.size() != b.assumptions.size() ||
        a.guarantees.size() != b.guarantees.size())
        return false;
    for (size_t i = 0; i < a.channels.size(); ++i) {
        const auto& x = a.channels[i];
        const auto& y = b.channels[i];
        if (x.name != y.name || x.type != y.type || x.polarity != y.polarity)
            return false;
    }
    for (size_t i = 0; i < a.locals.size(); ++i) {
        const auto& x = a.locals[i];
        const auto& y = b.locals[i];
        if (x.name != y.name || x.type != y.type || !expr_equal(x.init, y.init))
            return false;
    }
    for (size_t i = 0; i < a.assumptions.size(); ++i) {
        if (a.assumptions[i].label != b.assumptions[i].label ||
            !pred_equal(a.assumptions[i].pred, b.assumptions[i].pred))
            return false;
    }
    for (size_t i = 0; i < a.guarantees.size(); ++i) {
        const auto& x = a.guarantees[i];
        const auto& y = b.guarantees[i];
        if (x.node.index() != y.node.index())
            return false;
        if (const auto* ig = std::get_if<InitialGuarantee>(&x.node)) {
            const auto& yg = std::get<InitialGuarantee>(y.node);
            if (ig->label != yg.label || ig->channel != yg.channel ||
                ig->elements.size() != yg.elements.size())
                return false;
            for (size_t j = 0; j < ig->elements.size(); ++j)
                if (!expr_equal(ig->elements[j], yg.elements[j]))
                    return false;
        } else if (const auto* p = std::get_if<LabeledPred>(&x.node)) {
            const auto& yp = std::get<LabeledPred>(y.node);
            if (p->label != yp.label || !pred_equal(p->pred, yp.pred))
                return false;
        } else {
            const auto& r = std::get<TransitionRule>(x.node);
            const auto& yr = std::get<TransitionRule>(y.node);
            if (r.label != yr.label || r.choices != yr.choices || !expr_equal(r.guard, yr.guard) ||
                !effect_equal(r.effect, yr.effect))
                return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Networks
// ---------------------------------------------------------------------------

struct ComponentInstance {
    std::string name;       // instance name (defaults to the spec name)
    std::string spec_name;
    ComponentSpec spec;     // resolved copy
    SourceSpan span;
};

// Consumer input channel fed by a producer output channel.
struct Wire {
    std::string to_instance;
    std::string to_channel;
    std::string from_instance;
    std::string from_channel;
    SourceSpan span;
};

enum class GeneratorKind { Cycle, Hold, Silent };

// Surface description of an external stimulus; intervals are literal
// expressions frozen by validation.
struct GeneratorDecl {
    GeneratorKind kind = GeneratorKind::Silent;
    std::vector<std::vector<ExprPtr>> interval_exprs;
    std::vector<TimeInterval> intervals;  // frozen
    SourceSpan span;
};

struct ExternalBinding {
    std::string to_instance;
    std::string to_channel;
    GeneratorDecl generator;
    SourceSpan span;
};

// A specification used purely as an observer: its channels are bound to
// network streams and its predicates checked over the trace.
struct MonitorBinding {
    std::string name;       // monitor instance label
    std::string spec_name;
    ComponentSpec spec;     // resolved copy
    // spec channel -> (producer instance, producer out channel)
    std::vector<std::tuple<std::string, std::string, std::string>> binds;
    SourceSpan span;
};

struct Network {
    std::string name;
    // When set, reads inside one rule observe assignments made earlier in
    // the same firing instead of the interval-start state.
    bool post_update_reads = false;
    std::vector<ComponentInstance> instances;
    std::vector<Wire> wires;
    std::vector<ExternalBinding> externals;
    std::vector<MonitorBinding> monitors;
    SourceSpan span;

    const ComponentInstance* find_instance(const std::string& name) const {
        for (const auto& i : instances)
            if (i.name == name)
                return &i;
        return nullptr;
    }
};

// ---------------------------------------------------------------------------
// Type declarations and parse units
// ---------------------------------------------------------------------------

struct TypeDecl {
    std::string name;
    MessageType type;
    SourceSpan span;
};

// One parsed source file: type declarations, component specs, networks.
struct SpecFile {
    std::vector<TypeDecl> types;
    std::vector<ComponentSpec> specs;
    std::vector<Network> networks;
};

inline bool type_decl_equal(const TypeDecl& a, const TypeDecl& b) {
    return a.name == b.name && a.type == b.type;
}

inline bool network_equal(const Network& a, const Network& b) {
    if (a.name != b.name || a.post_update_reads != b.post_update_reads ||
        a.instances.size() != b.instances.size() || a.wires.size() != b.wires.size() ||
        a.externals.size() != b.externals.size() || a.monitors.size() != b.monitors.size())
        return false;
    for (size_t i = 0; i < a.instances.size(); ++i)
        if (a.instances[i].name != b.instances[i].name || a.instances[i].spec_name != b.instances[i].spec_name)
            return false;
    for (size_t i = 0; i < a.wires.size(); ++i) {
        const auto& x = a.wires[i];
        const auto& y = b.wires[i];
        if (x.to_instance != y.to_instance || x.to_channel != y.to_channel ||
            x.from_instance != y.from_instance || x.from_channel != y.from_channel)
            return false;
    }
    for (size_t i = 0; i < a.externals.size(); ++i) {
        const auto& x = a.externals[i];
        const auto& y = b.externals[i];
        if (x.to_instance != y.to_instance || x.to_channel != y.to_channel ||
            x.generator.kind != y.generator.kind ||
            x.generator.interval_exprs.size() != y.generator.interval_exprs.size())
            return false;
        for (size_t j = 0; j < x.generator.interval_exprs.size(); ++j) {
            const auto& xs = x.generator.interval_exprs[j];
            const auto& ys = y.generator.interval_exprs[j];
            if (xs.size() != ys.size())
                return false;
            for (size_t k = 0; k < xs.size(); ++k)
                if (!expr_equal(xs[k], ys[k]))
                    return false;
        }
    }
    for (size_t i = 0; i < a.monitors.size(); ++i) {
        const auto& x = a.monitors[i];
        const auto& y = b.monitors[i];
        if (x.name != y.name || x.spec_name != y.spec_name || x.binds != y.binds)
            return false;
    }
    return true;
}

inline bool spec_file_equal(const SpecFile& a, const SpecFile& b) {
    if (a.types.size() != b.types.size() || a.specs.size() != b.specs.size() ||
        a.networks.size() != b.networks.size())
        return false;
    for (size_t i = 0; i < a.types.size(); ++i)
        if (!type_decl_equal(a.types[i], b.types[i]))
            return false;
    for (size_t i = 0; i < a.specs.size(); ++i)
        if (!spec_equal(a.specs[i], b.specs[i]))
            return false;
    for (size_t i = 0; i < a.networks.size(); ++i)
        if (!network_equal(a.networks[i], b.networks[i]))
            return false;
    return true;
}

}  // namespace focusst
