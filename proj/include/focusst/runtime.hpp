#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "focusst/analysis.hpp"
#include "focusst/ast.hpp"
#include "focusst/operators.hpp"
#include "focusst/stream.hpp"

namespace focusst {

// ---------------------------------------------------------------------------
// Seeded deterministic random source
// ---------------------------------------------------------------------------

// SplitMix64 with rejection sampling for bounded draws. The algorithm is
// fixed here (not delegated to the standard library's distributions) so that
// identical seeds give identical traces on every platform.
class Rng {
public:
    explicit Rng(Nat seed) : state_(seed) {}

    Nat next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        Nat z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform over [lo, hi], both inclusive.
    Nat range(Nat lo, Nat hi) {
        if (lo > hi)
            throw InvalidArgument("empty draw range");
        Nat n = hi - lo + 1;
        if (n == 0)  // full 64-bit range
            return next();
        Nat limit = UINT64_MAX - UINT64_MAX % n;
        Nat x;
        do {
            x = next();
        } while (x >= limit);
        return lo + x % n;
    }

private:
    Nat state_;
};

// ---------------------------------------------------------------------------
// Expression evaluation
// ---------------------------------------------------------------------------

struct EvalError : Error {
    using Error::Error;
};

namespace detail {

struct EvalEnv {
    const ComponentSpec* spec = nullptr;
    const std::vector<Message>* locals = nullptr;  // aligned with spec->locals
    const std::vector<std::pair<std::string, Nat>>* choices = nullptr;
    // rule inputs, aligned with spec->inputs(); may be null for predicates
    const std::vector<const TimeInterval*>* inputs = nullptr;
    // predicate evaluation reads a single designated channel instead
    const std::string* single_channel = nullptr;
    const TimeInterval* single_interval = nullptr;
    std::vector<std::string>* warnings = nullptr;

    const Message& local(const std::string& name) const {
        const auto& decls = spec->locals;
        for (size_t i = 0; i < decls.size(); ++i)
            if (decls[i].name == name)
                return (*locals)[i];
        throw EvalError("internal fault: unknown local '" + name + "'");
    }

    Message* local_slot(const std::string& name, std::vector<Message>& storage) const {
        const auto& decls = spec->locals;
        for (size_t i = 0; i < decls.size(); ++i)
            if (decls[i].name == name)
                return &storage[i];
        return nullptr;
    }

    Nat choice(const std::string& name) const {
        if (choices)
            for (const auto& [var, value] : *choices)
                if (var == name)
                    return value;
        throw EvalError("internal fault: unbound choice variable '" + name + "'");
    }

    const TimeInterval& interval(const std::string& channel) const {
        if (single_channel && *single_channel == channel)
            return *single_interval;
        if (inputs) {
            auto ins = spec->inputs();
            for (size_t i = 0; i < ins.size(); ++i)
                if (ins[i]->name == channel)
                    return *(*inputs)[i];
        }
        throw EvalError("internal fault: no interval for channel '" + channel + "'");
    }

    void warn(std::string note) const {
        if (warnings)
            warnings->push_back(std::move(note));
    }
};

inline Message eval_expr(const ExprPtr& e, const EvalEnv& env);
inline bool eval_bool(const ExprPtr& e, const EvalEnv& env);

// Resolves ft(chan[t]) straight off the interval, bypassing the list value.
inline const Message& eval_first_of_interval(const FtExpr& ft, const EvalEnv& env) {
    const auto& read = std::get<IntervalRead>(ft.arg->node);
    const TimeInterval& iv = env.interval(read.channel);
    if (iv.empty())
        throw EvalError("ft applied to empty interval");
    return iv.messages().front();
}

inline Nat eval_nat(const ExprPtr& e, const EvalEnv& env) {
    // allocation-free paths for the shapes guards are made of
    if (const auto* num = std::get_if<NumLit>(&e->node))
        return num->value;
    if (const auto* var = std::get_if<VarRead>(&e->node)) {
        if (var->kind == VarKind::Choice)
            return env.choice(var->name);
        const Message& m = env.local(var->name);
        if (m.type().kind() == MessageType::Kind::Nat)
            return m.nat_value();
        throw EvalError("internal fault: Nat expected");
    }
    if (const auto* ft = std::get_if<FtExpr>(&e->node))
        if (std::holds_alternative<IntervalRead>(ft->arg->node)) {
            const Message& m = eval_first_of_interval(*ft, env);
            if (m.type().kind() == MessageType::Kind::Nat)
                return m.nat_value();
            throw EvalError("internal fault: Nat expected");
        }
    if (const auto* bin = std::get_if<BinExpr>(&e->node)) {
        if (bin->op == BinOp::Add) {
            try {
                return checked_add(eval_nat(bin->lhs, env), eval_nat(bin->rhs, env));
            } catch (const OverflowError& err) {
                throw EvalError(err.what());
            }
        }
        if (bin->op == BinOp::Sub) {
            Nat a = eval_nat(bin->lhs, env);
            Nat b = eval_nat(bin->rhs, env);
            auto r = saturating_sub(a, b);
            if (r.underflowed)
                env.warn("nat underflow: " + std::to_string(a) + " - " + std::to_string(b) +
                         " saturated at 0");
            return r.value;
        }
    }
    if (const auto* ife = std::get_if<IfExpr>(&e->node))
        return eval_nat(eval_bool(ife->cond, env) ? ife->then_branch : ife->else_branch, env);
    Message m = eval_expr(e, env);
    if (m.type().kind() != MessageType::Kind::Nat)
        throw EvalError("internal fault: Nat expected");
    return m.nat_value();
}

// Equality with an interval read on one side compares against the raw
// interval, sparing the list construction.
inline bool eval_interval_eq(const IntervalRead& read, const ExprPtr& other, const EvalEnv& env) {
    const TimeInterval& iv = env.interval(read.channel);
    if (const auto* list = std::get_if<ListExpr>(&other->node)) {
        if (iv.size() != list->elements.size())
            return false;
        for (Nat i = 0; i < iv.size(); ++i)
            if (!(iv.at(i) == eval_expr(list->elements[i], env)))
                return false;
        return true;
    }
    Message rhs = eval_expr(other, env);
    if (rhs.type().kind() != MessageType::Kind::List || iv.size() != rhs.list_elements().size())
        return false;
    for (Nat i = 0; i < iv.size(); ++i)
        if (!(iv.at(i) == rhs.list_elements()[i]))
            return false;
    return true;
}

inline bool eval_bool(const ExprPtr& e, const EvalEnv& env) {
    // boolean connectives short-circuit left to right
    if (const auto* bin = std::get_if<BinExpr>(&e->node)) {
        switch (bin->op) {
        case BinOp::And: return eval_bool(bin->lhs, env) && eval_bool(bin->rhs, env);
        case BinOp::Or: return eval_bool(bin->lhs, env) || eval_bool(bin->rhs, env);
        case BinOp::Implies: return !eval_bool(bin->lhs, env) || eval_bool(bin->rhs, env);
        case BinOp::Lt: return eval_nat(bin->lhs, env) < eval_nat(bin->rhs, env);
        case BinOp::Le: return eval_nat(bin->lhs, env) <= eval_nat(bin->rhs, env);
        case BinOp::Gt: return eval_nat(bin->lhs, env) > eval_nat(bin->rhs, env);
        case BinOp::Ge: return eval_nat(bin->lhs, env) >= eval_nat(bin->rhs, env);
        case BinOp::Eq:
        case BinOp::Ne: {
            bool equal;
            if (const auto* read = std::get_if<IntervalRead>(&bin->lhs->node)) {
                equal = eval_interval_eq(*read, bin->rhs, env);
            } else if (const auto* rread = std::get_if<IntervalRead>(&bin->rhs->node)) {
                equal = eval_interval_eq(*rread, bin->lhs, env);
            } else {
                auto local_ref = [&](const ExprPtr& side) -> const Message* {
                    const auto* var = std::get_if<VarRead>(&side->node);
                    return var && var->kind == VarKind::Local ? &env.local(var->name) : nullptr;
                };
                const Message* lref = local_ref(bin->lhs);
                const Message* rref = local_ref(bin->rhs);
                std::optional<Message> lval, rval;
                if (!lref)
                    lval = eval_expr(bin->lhs, env);
                if (!rref)
                    rval = eval_expr(bin->rhs, env);
                equal = (lref ? *lref : *lval) == (rref ? *rref : *rval);
            }
            return bin->op == BinOp::Eq ? equal : !equal;
        }
        default: break;
        }
    }
    if (const auto* n = std::get_if<NotExpr>(&e->node))
        return !eval_bool(n->arg, env);
    if (const auto* ife = std::get_if<IfExpr>(&e->node))
        return eval_bool(eval_bool(ife->cond, env) ? ife->then_branch : ife->else_branch, env);
    Message m = eval_expr(e, env);
    if (m.type().kind() != MessageType::Kind::Bool)
        throw EvalError("internal fault: boolean expected");
    return m.bool_value();
}

inline Message eval_expr(const ExprPtr& e, const EvalEnv& env) {
    return std::visit(
        [&](const auto& node) -> Message {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, NumLit>) {
                if (e->resolved_type && e->resolved_type->kind() == MessageType::Kind::Bit)
                    return Message::bit(node.value);
                return Message::nat(node.value);
            } else if constexpr (std::is_same_v<T, BoolLit>) {
                return Message::boolean(node.value);
            } else if constexpr (std::is_same_v<T, CtorLit>) {
                if (!e->resolved_type)
                    throw EvalError("internal fault: unresolved constructor literal");
                if (node.resolved_index)
                    return Message::enumerated_by_index(*e->resolved_type, *node.resolved_index);
                return Message::enumerated(*e->resolved_type, node.constructor);
            } else if constexpr (std::is_same_v<T, VarRead>) {
                if (node.kind == VarKind::Choice)
                    return Message::nat(env.choice(node.name));
                return env.local(node.name);
            } else if constexpr (std::is_same_v<T, IntervalRead>) {
                const TimeInterval& iv = env.interval(node.channel);
                if (!e->resolved_type)
                    throw EvalError("internal fault: unresolved interval read");
                return Message::list(e->resolved_type->element(), iv.messages());
            } else if constexpr (std::is_same_v<T, FtExpr>) {
                if (std::holds_alternative<IntervalRead>(node.arg->node))
                    return eval_first_of_interval(node, env);
                Message list = eval_expr(node.arg, env);
                if (list.type().kind() != MessageType::Kind::List)
                    throw EvalError("internal fault: ft on non-list");
                if (list.list_elements().empty())
                    throw EvalError("ft applied to empty interval");
                return list.list_elements().front();
            } else if constexpr (std::is_same_v<T, ListExpr>) {
                if (!e->resolved_type)
                    throw EvalError("internal fault: unresolved list literal");
                std::vector<Message> elems;
                elems.reserve(node.elements.size());
                for (const auto& el : node.elements)
                    elems.push_back(eval_expr(el, env));
                return Message::list(e->resolved_type->element(), std::move(elems));
            } else if constexpr (std::is_same_v<T, NotExpr> || std::is_same_v<T, IfExpr>) {
                if constexpr (std::is_same_v<T, NotExpr>) {
                    return Message::boolean(!eval_bool(node.arg, env));
                } else {
                    return eval_expr(eval_bool(node.cond, env) ? node.then_branch : node.else_branch, env);
                }
            } else {  // BinExpr
                const BinExpr& bin = node;
                switch (bin.op) {
                case BinOp::Add: {
                    Nat a = eval_nat(bin.lhs, env);
                    Nat b = eval_nat(bin.rhs, env);
                    try {
                        return Message::nat(checked_add(a, b));
                    } catch (const OverflowError& err) {
                        throw EvalError(err.what());
                    }
                }
                case BinOp::Sub: {
                    Nat a = eval_nat(bin.lhs, env);
                    Nat b = eval_nat(bin.rhs, env);
                    auto r = saturating_sub(a, b);
                    if (r.underflowed)
                        env.warn("nat underflow: " + std::to_string(a) + " - " + std::to_string(b) +
                                 " saturated at 0");
                    return Message::nat(r.value);
                }
                case BinOp::Lt:
                case BinOp::Le:
                case BinOp::Gt:
                case BinOp::Ge: {
                    Nat a = eval_nat(bin.lhs, env);
                    Nat b = eval_nat(bin.rhs, env);
                    bool v = bin.op == BinOp::Lt   ? a < b
                             : bin.op == BinOp::Le ? a <= b
                             : bin.op == BinOp::Gt ? a > b
                                                   : a >= b;
                    return Message::boolean(v);
                }
                case BinOp::Eq:
                case BinOp::Ne: {
                    Message a = eval_expr(bin.lhs, env);
                    Message b = eval_expr(bin.rhs, env);
                    bool equal = a == b;
                    return Message::boolean(bin.op == BinOp::Eq ? equal : !equal);
                }
                case BinOp::And:
                case BinOp::Or:
                case BinOp::Implies:
                    return Message::boolean(eval_bool(e, env));
                }
                throw EvalError("internal fault: unknown operator");
            }
        },
        e->node);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Component firing
// ---------------------------------------------------------------------------

// Precomputed execution view of one component spec: rules in label order,
// channel/locals layout, and initial values.
struct ExecSpec {
    const ComponentSpec* spec = nullptr;
    std::vector<const TransitionRule*> rules;  // sorted by label number
    std::vector<const ChannelDecl*> inputs;
    std::vector<const ChannelDecl*> outputs;
    std::vector<Message> init_locals;
    std::vector<TimeInterval> init_pending;  // step-0 outputs (I* or empty)

    explicit ExecSpec(const ComponentSpec& s) : spec(&s) {
        for (const auto* r : s.rules())
            rules.push_back(r);
        std::sort(rules.begin(), rules.end(), [](const TransitionRule* a, const TransitionRule* b) {
            return detail::label_number(a->label) < detail::label_number(b->label);
        });
        inputs = s.inputs();
        outputs = s.outputs();
        for (const auto& l : s.locals) {
            if (!l.init_value)
                throw ConfigError("component '" + s.name + "' was not validated");
            init_locals.push_back(*l.init_value);
        }
        init_pending.assign(outputs.size(), TimeInterval());
        for (const auto* ig : s.initial_guarantees()) {
            if (!ig->value)
                throw ConfigError("component '" + s.name + "' was not validated");
            for (size_t i = 0; i < outputs.size(); ++i)
                if (outputs[i]->name == ig->channel)
                    init_pending[i] = *ig->value;
        }
    }

    std::optional<size_t> output_index(const std::string& name) const {
        for (size_t i = 0; i < outputs.size(); ++i)
            if (outputs[i]->name == name)
                return i;
        return std::nullopt;
    }
};

// Outcome of evaluating one component at one step.
struct Firing {
    bool fired = false;
    const TransitionRule* rule = nullptr;
    std::vector<std::string> enabled;  // labels of all enabled rules
    std::vector<TimeInterval> outputs;
    std::vector<Message> locals_after;
    std::vector<std::pair<std::string, Nat>> choices;  // drawn for the fired rule
    std::vector<std::pair<std::string, std::string>> errors;    // (rule label, what)
    std::vector<std::pair<std::string, std::string>> warnings;  // (rule label, note)
};

// Draws the witness for a choose binding; nothing means the source cannot
// supply one (for log-driven replay of malformed traces).
using ChoiceSource = std::function<std::optional<Nat>(const ChooseBinding&)>;

// Evaluates guards in label order, fires the first enabled rule, and applies
// the implicit else-case otherwise: unassigned locals keep their values and
// unmentioned outputs stay empty. Guard or effect evaluation errors demote
// the step to the else-case and are reported per rule.
inline Firing fire_component(const ExecSpec& xs, const std::vector<Message>& locals,
                             const std::vector<const TimeInterval*>& inputs, const ChoiceSource& draw,
                             bool post_update_reads = false) {
    Firing result;
    result.locals_after = locals;
    result.outputs.assign(xs.outputs.size(), TimeInterval());

    detail::EvalEnv guard_env;
    guard_env.spec = xs.spec;
    guard_env.locals = &locals;
    guard_env.inputs = &inputs;

    const TransitionRule* selected = nullptr;
    for (const auto* rule : xs.rules) {
        bool enabled = false;
        if (!rule->guard) {
            enabled = true;
        } else {
            try {
                enabled = detail::eval_bool(rule->guard, guard_env);
            } catch (const EvalError& e) {
                result.errors.emplace_back(rule->label, std::string("guard: ") + e.what());
                continue;
            }
        }
        if (enabled) {
            result.enabled.push_back(rule->label);
            if (!selected)
                selected = rule;
        }
    }
    if (!selected)
        return result;

    result.fired = true;
    result.rule = selected;

    for (const auto& binding : selected->choices) {
        auto value = draw(binding);
        if (!value) {
            result.errors.emplace_back(selected->label, "no recorded choice for '" + binding.var + "'");
            return result;
        }
        if (*value < binding.lo || *value > binding.hi)
            result.errors.emplace_back(selected->label,
                                       "choice '" + binding.var + "' = " + std::to_string(*value) +
                                           " outside " + std::to_string(binding.lo) + ".." +
                                           std::to_string(binding.hi));
        result.choices.emplace_back(binding.var, *value);
    }

    std::vector<std::string> eval_warnings;
    detail::EvalEnv env;
    env.spec = xs.spec;
    env.locals = post_update_reads ? &result.locals_after : &locals;
    env.choices = &result.choices;
    env.inputs = &inputs;
    env.warnings = &eval_warnings;

    auto apply_block = [&](auto&& self, const EffectBlock& block) -> void {
        for (const auto& item : block.items) {
            if (const auto* assign = std::get_if<Assignment>(&item.node)) {
                if (assign->target_kind == AssignTargetKind::Local) {
                    Message value = detail::eval_expr(assign->value, env);
                    Message* slot = env.local_slot(assign->target, result.locals_after);
                    if (!slot)
                        throw EvalError("internal fault: unknown local '" + assign->target + "'");
                    *slot = std::move(value);
                } else {
                    auto idx = xs.output_index(assign->target);
                    if (!idx)
                        throw EvalError("internal fault: unknown output '" + assign->target + "'");
                    if (const auto* list = std::get_if<ListExpr>(&assign->value->node)) {
                        std::vector<Message> msgs;
                        msgs.reserve(list->elements.size());
                        for (const auto& el : list->elements)
                            msgs.push_back(detail::eval_expr(el, env));
                        result.outputs[*idx] = TimeInterval(std::move(msgs));
                    } else {
                        Message value = detail::eval_expr(assign->value, env);
                        result.outputs[*idx] = TimeInterval(std::move(value).into_list());
                    }
                }
            } else {
                const auto& ife = std::get<IfEffect>(item.node);
                if (detail::eval_bool(ife.cond, env))
                    self(self, ife.then_branch);
                else
                    self(self, ife.else_branch);
            }
        }
    };

    try {
        apply_block(apply_block, selected->effect);
    } catch (const EvalError& e) {
        result.errors.emplace_back(selected->label, std::string("effect: ") + e.what());
        // the whole firing falls back to the implicit else-case
        result.locals_after = locals;
        result.outputs.assign(xs.outputs.size(), TimeInterval());
    }
    for (auto& note : eval_warnings)
        result.warnings.emplace_back(selected->label, std::move(note));
    return result;
}

// ---------------------------------------------------------------------------
// Traces
// ---------------------------------------------------------------------------

enum class VerdictStatus { Satisfied, Violated, VacuouslySatisfied, Warning };

inline const char* to_string(VerdictStatus s) {
    switch (s) {
    case VerdictStatus::Satisfied: return "Satisfied";
    case VerdictStatus::Violated: return "Violated";
    case VerdictStatus::VacuouslySatisfied: return "VacuouslySatisfied";
    case VerdictStatus::Warning: return "Warning";
    }
    return "?";
}

struct MonitorVerdict {
    std::string label;
    VerdictStatus status = VerdictStatus::Satisfied;
    std::optional<Nat> first_violation_step;
    std::string detail;
};

struct ChoiceRecord {
    Nat step = 0;
    std::string component;
    std::string var;
    Nat value = 0;

    bool operator==(const ChoiceRecord&) const = default;
};

struct Trace {
    Nat horizon = 0;
    // aligned with NetworkIndex::streams()
    std::vector<std::string> stream_names;
    std::vector<TimedStreamPrefix> streams;
    // local_history[instance][t][local]; index 0 holds the init values,
    // index horizon the state after the final step
    std::vector<std::vector<std::vector<Message>>> local_history;
    std::vector<ChoiceRecord> choices;
    std::vector<MonitorVerdict> verdicts;

    const TimedStreamPrefix& stream(const std::string& display_name) const {
        for (size_t i = 0; i < stream_names.size(); ++i)
            if (stream_names[i] == display_name)
                return streams[i];
        throw ConfigError("no stream named '" + display_name + "' in trace");
    }
};

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

// Executes a validated network interval by interval. One instance is
// single-threaded; distinct instances (e.g. different seeds) are independent.
class Simulation {
public:
    Simulation(const NetworkIndex& index, Nat seed) : index_(&index), rng_(seed) {
        const Network& net = index.network();
        for (const auto& inst : net.instances)
            exec_.emplace_back(inst.spec);
        for (const auto& xs : exec_) {
            states_.push_back({xs.init_locals, xs.init_pending});
        }
        out_stream_.resize(net.instances.size());
        ext_stream_.resize(net.externals.size());
        for (Nat i = 0; i < net.instances.size(); ++i)
            for (const auto* out : exec_[i].outputs)
                out_stream_[i].push_back(index.stream_of_output(net.instances[i].name, out->name));
        for (Nat e = 0; e < net.externals.size(); ++e)
            ext_stream_[e] = index.stream_of_output(
                "<ext>", net.externals[e].to_instance + "." + net.externals[e].to_channel);
        for (const auto& ext : net.externals)
            generators_.push_back(make_generator(ext, index));
        trace_.stream_names.reserve(index.streams().size());
        for (const auto& s : index.streams()) {
            trace_.stream_names.push_back(s.display_name);
            trace_.streams.emplace_back(s.type);
        }
        trace_.local_history.resize(net.instances.size());
        for (size_t i = 0; i < net.instances.size(); ++i)
            trace_.local_history[i].push_back(states_[i].locals);
    }

    struct ComponentState {
        std::vector<Message> locals;
        std::vector<TimeInterval> pending_outputs;
    };

    Nat now() const { return now_; }
    const Trace& trace() const { return trace_; }
    Trace take_trace() { return std::move(trace_); }

    // One interval: externals produce, strongly causal components emit their
    // pending intervals, weakly causal components fire in topological order,
    // then strongly causal components compute the next pending intervals
    // from this step's inputs.
    void step() {
        const Network& net = index_->network();
        const Nat t = now_;
        std::vector<TimeInterval> current(index_->streams().size());

        for (Nat e = 0; e < net.externals.size(); ++e)
            current[ext_stream_[e]] = generators_[e].produce(t);

        for (Nat i = 0; i < exec_.size(); ++i)
            if (exec_[i].spec->causality == Causality::StronglyCausal)
                for (size_t o = 0; o < exec_[i].outputs.size(); ++o) {
                    // pending is reassigned by this step's compute phase
                    current[out_stream_[i][o]] = std::move(states_[i].pending_outputs[o]);
                }

        auto fire_at = [&](Nat i) {
            std::vector<const TimeInterval*> inputs;
            inputs.reserve(exec_[i].inputs.size());
            for (size_t k = 0; k < exec_[i].inputs.size(); ++k)
                inputs.push_back(&current[index_->input_stream(i, k)]);
            ChoiceSource draw = [&](const ChooseBinding& b) -> std::optional<Nat> {
                Nat value = rng_.range(b.lo, b.hi);
                return value;
            };
            Firing firing =
                fire_component(exec_[i], states_[i].locals, inputs, draw, net.post_update_reads);
            for (const auto& [var, value] : firing.choices)
                trace_.choices.push_back({t, net.instances[i].name, var, value});
            states_[i].locals = std::move(firing.locals_after);
            if (exec_[i].spec->causality == Causality::WeaklyCausal) {
                for (size_t o = 0; o < exec_[i].outputs.size(); ++o)
                    current[out_stream_[i][o]] = std::move(firing.outputs[o]);
            } else {
                states_[i].pending_outputs = std::move(firing.outputs);
            }
        };

        for (Nat i : index_->firing_order())
            if (exec_[i].spec->causality == Causality::WeaklyCausal)
                fire_at(i);
        for (Nat i = 0; i < exec_.size(); ++i)
            if (exec_[i].spec->causality == Causality::StronglyCausal)
                fire_at(i);

        for (size_t s = 0; s < current.size(); ++s)
            trace_.streams[s].append(std::move(current[s]));
        for (size_t i = 0; i < states_.size(); ++i)
            trace_.local_history[i].push_back(states_[i].locals);
        trace_.horizon = ++now_;
    }

    static StreamGenerator make_generator(const ExternalBinding& ext, const NetworkIndex& index) {
        const auto& net = index.network();
        const auto* inst = net.find_instance(ext.to_instance);
        const auto* chan = inst->spec.find_channel(ext.to_channel);
        switch (ext.generator.kind) {
        case GeneratorKind::Silent: return StreamGenerator::silent(chan->type);
        case GeneratorKind::Cycle: return StreamGenerator::cycle(chan->type, ext.generator.intervals);
        case GeneratorKind::Hold: return StreamGenerator::hold(chan->type, ext.generator.intervals);
        }
        throw ConfigError("unknown generator kind");
    }

private:
    const NetworkIndex* index_;
    std::vector<ExecSpec> exec_;
    std::vector<ComponentState> states_;
    std::vector<StreamGenerator> generators_;
    std::vector<std::vector<Nat>> out_stream_;  // [instance][output] -> stream
    std::vector<Nat> ext_stream_;               // [external] -> stream
    Rng rng_;
    Trace trace_;
    Nat now_ = 0;
};

std::vector<MonitorVerdict> monitor(const Trace& trace, const NetworkIndex& index);

// Runs the network for the given horizon and evaluates all monitors over the
// completed trace. A pure function of (network, horizon, seed).
inline Trace run(const NetworkIndex& index, Nat horizon, Nat seed) {
    if (horizon == 0)
        throw InvalidArgument("run horizon must be >= 1");
    Simulation sim(index, seed);
    for (Nat t = 0; t < horizon; ++t)
        sim.step();
    Trace trace = sim.take_trace();
    trace.verdicts = monitor(trace, index);
    return trace;
}

inline Trace run(const Network& net, Nat horizon, Nat seed) {
    NetworkIndex index(net);
    return run(index, horizon, seed);
}

// ---------------------------------------------------------------------------
// Monitoring
// ---------------------------------------------------------------------------

namespace detail {

struct PredOutcome {
    bool ok = true;
    Nat step = 0;
    std::string detail;
};

// Evaluates a monitor predicate over the prefixes it references.
inline PredOutcome eval_pred(const MonitorPred& pred, const ComponentSpec& spec,
                             const std::function<const TimedStreamPrefix&(const std::string&)>& stream_of) {
    PredOutcome out;
    if (const auto* ts = std::get_if<TsPred>(&pred.node)) {
        const auto& s = stream_of(ts->channel);
        for (Nat t = 0; t < s.length(); ++t)
            if (s.interval_at(t).size() != 1)
                return {false, t,
                        "ts(" + ts->channel + "): interval has " +
                            std::to_string(s.interval_at(t).size()) + " messages"};
    } else if (const auto* msg = std::get_if<MsgPred>(&pred.node)) {
        const auto& s = stream_of(msg->channel);
        for (Nat t = 0; t < s.length(); ++t)
            if (s.interval_at(t).size() > msg->bound)
                return {false, t,
                        "msg(" + msg->channel + ", " + std::to_string(msg->bound) +
                            "): interval has " + std::to_string(s.interval_at(t).size()) + " messages"};
    } else if (std::get_if<TruePred>(&pred.node)) {
        return out;
    } else if (const auto* ip = std::get_if<IntervalPred>(&pred.node)) {
        const auto& s = stream_of(ip->channel);
        EvalEnv env;
        env.spec = &spec;
        env.single_channel = &ip->channel;
        for (Nat t = 0; t < s.length(); ++t) {
            env.single_interval = &s.interval_at(t);
            try {
                if (!eval_bool(ip->predicate, env))
                    return {false, t, "interval predicate false at step " + std::to_string(t)};
            } catch (const EvalError& e) {
                return {false, t, e.what()};
            }
        }
    } else if (const auto* eq = std::get_if<StreamEqPred>(&pred.node)) {
        const auto& a = stream_of(eq->left);
        const auto& b = stream_of(eq->right);
        Nat n = std::min(a.length(), b.length());
        for (Nat t = 0; t < n; ++t)
            if (a.interval_at(t) != b.interval_at(t))
                return {false, t, eq->left + " and " + eq->right + " differ at step " + std::to_string(t)};
    }
    return out;
}

// First-occurrence collector keyed by verdict label.
class VerdictSink {
public:
    void violated(const std::string& label, Nat step, const std::string& detail) {
        record(label, VerdictStatus::Violated, step, detail);
    }

    void warning(const std::string& label, Nat step, const std::string& detail) {
        record(label, VerdictStatus::Warning, step, detail);
    }

    const std::vector<MonitorVerdict>& entries() const { return entries_; }

private:
    void record(const std::string& label, VerdictStatus status, Nat step, const std::string& detail) {
        for (auto& v : entries_)
            if (v.label == label) {
                return;  // keep the first occurrence
            }
        entries_.push_back({label, status, step, detail});
    }

    std::vector<MonitorVerdict> entries_;
};

}  // namespace detail

// Checks the completed trace against every component contract and system
// property: assumptions over input prefixes, then (unless an assumption
// failed, which makes the guarantees vacuous) initial guarantees, a replay
// of the transition rules against the recorded streams and choices, and the
// monitor-only predicates.
inline std::vector<MonitorVerdict> monitor(const Trace& trace, const NetworkIndex& index) {
    if (trace.horizon == 0)
        throw InvalidArgument("cannot monitor an empty trace");
    const Network& net = index.network();
    std::vector<MonitorVerdict> verdicts;

    // per-instance queues over the shared choice log
    std::vector<std::vector<const ChoiceRecord*>> choice_queue(net.instances.size());
    for (const auto& rec : trace.choices)
        for (Nat i = 0; i < net.instances.size(); ++i)
            if (net.instances[i].name == rec.component)
                choice_queue[i].push_back(&rec);

    for (Nat i = 0; i < net.instances.size(); ++i) {
        const auto& inst = net.instances[i];
        ExecSpec xs(inst.spec);

        auto input_stream_of = [&](const std::string& channel) -> const TimedStreamPrefix& {
            for (size_t k = 0; k < xs.inputs.size(); ++k)
                if (xs.inputs[k]->name == channel)
                    return trace.streams[index.input_stream(i, k)];
            throw ConfigError("unknown channel '" + channel + "' in property of '" + inst.name + "'");
        };
        auto output_stream_of = [&](const std::string& channel) -> const TimedStreamPrefix& {
            return trace.streams[index.stream_of_output(inst.name, channel)];
        };
        auto any_stream_of = [&](const std::string& channel) -> const TimedStreamPrefix& {
            const auto* decl = inst.spec.find_channel(channel);
            if (decl && decl->polarity == Polarity::In)
                return input_stream_of(channel);
            return output_stream_of(channel);
        };

        bool vacuous = false;
        std::string violated_assumption;
        for (const auto& a : inst.spec.assumptions) {
            auto outcome = detail::eval_pred(a.pred, inst.spec, input_stream_of);
            if (outcome.ok) {
                verdicts.push_back({inst.name + "." + a.label, VerdictStatus::Satisfied, {}, ""});
            } else {
                verdicts.push_back(
                    {inst.name + "." + a.label, VerdictStatus::Violated, outcome.step, outcome.detail});
                if (!vacuous) {
                    vacuous = true;
                    violated_assumption = a.label;
                }
            }
        }

        if (vacuous) {
            for (const auto& g : inst.spec.guarantees)
                verdicts.push_back({inst.name + "." + g.label(), VerdictStatus::VacuouslySatisfied, {},
                                    "assumption " + violated_assumption + " violated"});
            continue;
        }

        // initial guarantees against step 0
        for (const auto* ig : xs.spec->initial_guarantees()) {
            const auto& s = output_stream_of(ig->channel);
            if (s.interval_at(0) == *ig->value)
                verdicts.push_back({inst.name + "." + ig->label, VerdictStatus::Satisfied, {}, ""});
            else
                verdicts.push_back({inst.name + "." + ig->label, VerdictStatus::Violated, Nat{0},
                                    ig->channel + "[0] = " + s.interval_at(0).to_string() + ", declared " +
                                        ig->value->to_string()});
        }

        // replay the rules over the recorded streams and choices
        detail::VerdictSink sink;
        std::map<std::string, Nat> fired_count;
        std::vector<Message> locals = xs.init_locals;
        std::vector<Nat> out_stream;
        for (const auto* out : xs.outputs)
            out_stream.push_back(index.stream_of_output(inst.name, out->name));
        size_t cursor = 0;
        for (Nat t = 0; t < trace.horizon; ++t) {
            std::vector<const TimeInterval*> inputs;
            inputs.reserve(xs.inputs.size());
            for (size_t k = 0; k < xs.inputs.size(); ++k)
                inputs.push_back(&trace.streams[index.input_stream(i, k)].interval_at(t));

            ChoiceSource draw = [&](const ChooseBinding& b) -> std::optional<Nat> {
                if (cursor < choice_queue[i].size()) {
                    const ChoiceRecord* rec = choice_queue[i][cursor];
                    if (rec->step == t && rec->var == b.var) {
                        ++cursor;
                        return rec->value;
                    }
                }
                return std::nullopt;
            };

            Firing firing = fire_component(xs, locals, inputs, draw, net.post_update_reads);
            for (const auto& [label, what] : firing.errors)
                sink.violated(inst.name + "." + label, t, what);
            for (const auto& [label, note] : firing.warnings)
                sink.warning(inst.name + "." + label, t, note);
            if (firing.enabled.size() >= 2) {
                std::string labels;
                for (const auto& l : firing.enabled)
                    labels += (labels.empty() ? "" : ", ") + l;
                sink.warning(inst.name + ".nondeterminism", t,
                             "guards " + labels + " enabled together at step " + std::to_string(t));
            }
            if (firing.fired)
                ++fired_count[firing.rule->label];

            // outputs predicted by the replay must match the trace
            Nat emit_at = inst.spec.causality == Causality::WeaklyCausal ? t : t + 1;
            if (emit_at < trace.horizon) {
                for (size_t o = 0; o < xs.outputs.size(); ++o) {
                    const auto& recorded = trace.streams[out_stream[o]].interval_at(emit_at);
                    if (recorded != firing.outputs[o]) {
                        std::string label =
                            firing.fired ? inst.name + "." + firing.rule->label : inst.name + ".else";
                        sink.violated(label, emit_at,
                                      xs.outputs[o]->name + "[" + std::to_string(emit_at) + "] = " +
                                          recorded.to_string() + ", expected " +
                                          firing.outputs[o].to_string());
                    }
                }
            }
            locals = std::move(firing.locals_after);
        }

        // per-rule verdicts in label order, then guarantee predicates
        for (const auto& g : inst.spec.guarantees) {
            if (std::holds_alternative<InitialGuarantee>(g.node))
                continue;  // reported above
            std::string label = inst.name + "." + g.label();
            const MonitorVerdict* recorded = nullptr;
            for (const auto& v : sink.entries())
                if (v.label == label)
                    recorded = &v;
            if (const auto* p = std::get_if<LabeledPred>(&g.node)) {
                auto outcome = detail::eval_pred(p->pred, inst.spec, any_stream_of);
                if (outcome.ok)
                    verdicts.push_back({label, VerdictStatus::Satisfied, {}, ""});
                else
                    verdicts.push_back({label, VerdictStatus::Violated, outcome.step, outcome.detail});
            } else if (recorded) {
                verdicts.push_back(*recorded);
            } else if (fired_count[g.label()] == 0) {
                verdicts.push_back(
                    {label, VerdictStatus::VacuouslySatisfied, {}, "guard never enabled"});
            } else {
                verdicts.push_back({label, VerdictStatus::Satisfied, {},
                                    std::to_string(fired_count[g.label()]) + " firings"});
            }
        }
        // any remaining synthetic verdicts (nondeterminism, implicit else)
        for (const auto& v : sink.entries()) {
            bool already = false;
            for (const auto& existing : verdicts)
                if (existing.label == v.label)
                    already = true;
            if (!already)
                verdicts.push_back(v);
        }
    }

    // system properties bound by monitor declarations
    for (const auto& mon : net.monitors) {
        auto bound_stream_of = [&](const std::string& channel) -> const TimedStreamPrefix& {
            for (const auto& [spec_chan, from_inst, from_chan] : mon.binds)
                if (spec_chan == channel)
                    return trace.streams[index.stream_of_output(from_inst, from_chan)];
            throw ConfigError("unknown channel '" + channel + "' in monitor '" + mon.name + "'");
        };
        bool vacuous = false;
        std::string violated_assumption;
        for (const auto& a : mon.spec.assumptions) {
            auto outcome = detail::eval_pred(a.pred, mon.spec, bound_stream_of);
            if (outcome.ok) {
                verdicts.push_back({mon.name + "." + a.label, VerdictStatus::Satisfied, {}, ""});
            } else {
                verdicts.push_back(
                    {mon.name + "." + a.label, VerdictStatus::Violated, outcome.step, outcome.detail});
                if (!vacuous) {
                    vacuous = true;
                    violated_assumption = a.label;
                }
            }
        }
        for (const auto* p : mon.spec.guarantee_preds()) {
            std::string label = mon.name + "." + p->label;
            if (vacuous) {
                verdicts.push_back({label, VerdictStatus::VacuouslySatisfied, {},
                                    "assumption " + violated_assumption + " violated"});
                continue;
            }
            auto outcome = detail::eval_pred(p->pred, mon.spec, bound_stream_of);
            if (outcome.ok)
                verdicts.push_back({label, VerdictStatus::Satisfied, {}, ""});
            else
                verdicts.push_back({label, VerdictStatus::Violated, outcome.step, outcome.detail});
        }
    }

    return verdicts;
}

inline bool any_violated(const std::vector<MonitorVerdict>& verdicts) {
    for (const auto& v : verdicts)
        if (v.status == VerdictStatus::Violated)
            return true;
    return false;
}

}  // namespace focusst
