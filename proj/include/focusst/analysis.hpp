#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "focusst/ast.hpp"
#include "focusst/diagnostics.hpp"

namespace focusst {

// Named user types (enumerations, records) visible to a specification.
class TypeEnv {
public:
    void declare(const std::string& name, const MessageType& type) { named_[name] = type; }

    const MessageType* lookup(const std::string& name) const {
        auto it = named_.find(name);
        return it == named_.end() ? nullptr : &it->second;
    }

    // Enumerations that declare the given constructor.
    std::vector<const MessageType*> enums_with_constructor(const std::string& ctor) const {
        std::vector<const MessageType*> out;
        for (const auto& [name, type] : named_)
            if (type.kind() == MessageType::Kind::Enumeration && type.constructor_index(ctor))
                out.push_back(&type);
        return out;
    }

    const std::map<std::string, MessageType>& all() const { return named_; }

private:
    std::map<std::string, MessageType> named_;
};

namespace detail {

inline bool is_weak_literal(const ExprPtr& e) {
    if (!e)
        return false;
    if (std::holds_alternative<NumLit>(e->node) || std::holds_alternative<ListExpr>(e->node))
        return true;
    if (const auto* ife = std::get_if<IfExpr>(&e->node))
        return is_weak_literal(ife->then_branch) && is_weak_literal(ife->else_branch);
    return false;
}

// Type checker for the executable expression fragment. Annotates each node
// with its resolved type so evaluation can build correctly typed messages.
class ExprChecker {
public:
    ExprChecker(const ComponentSpec& spec, const TypeEnv& env, std::vector<Diagnostic>& diags)
        : spec_(spec), env_(env), diags_(diags) {}

    // Channels readable via chan[t]; by default the component's inputs.
    void restrict_to_channel(const ChannelDecl* only) { only_channel_ = only; }
    void set_choices(const std::vector<ChooseBinding>* choices) { choices_ = choices; }
    void set_allow_choice_vars(bool allow) { allow_choice_vars_ = allow; }

    std::optional<MessageType> check(const ExprPtr& e, const std::optional<MessageType>& expected) {
        if (!e)
            return std::nullopt;
        resolve_bare_name(e, expected);
        auto resolved = std::visit([&](auto& node) { return check_node(node, *e, expected); }, e->node);
        if (resolved && expected && *resolved != *expected) {
            error(e->span, "expected " + expected->to_string() + ", got " + resolved->to_string());
            return std::nullopt;
        }
        if (resolved)
            e->resolved_type = *resolved;
        return resolved;
    }

private:
    // A bare identifier that names no local or choice variable normalizes to
    // an enumeration constructor literal when one is in scope.
    void resolve_bare_name(const ExprPtr& e, const std::optional<MessageType>& expected) {
        const auto* var = std::get_if<VarRead>(&e->node);
        if (!var || spec_.find_local(var->name))
            return;
        if (choices_)
            for (const auto& c : *choices_)
                if (c.var == var->name)
                    return;
        std::string name = var->name;
        if (expected && expected->kind() == MessageType::Kind::Enumeration &&
            expected->constructor_index(name)) {
            e->node = CtorLit{std::move(name)};
            return;
        }
        if (env_.enums_with_constructor(name).size() == 1)
            e->node = CtorLit{std::move(name)};
    }

    std::optional<MessageType> check_node(NumLit& lit, Expr& e, const std::optional<MessageType>& expected) {
        if (expected && expected->kind() == MessageType::Kind::Bit) {
            if (lit.value > 1) {
                error(e.span, "bit literal must be 0 or 1");
                return std::nullopt;
            }
            return MessageType::bit();
        }
        return MessageType::nat();
    }

    std::optional<MessageType> check_node(BoolLit&, Expr&, const std::optional<MessageType>&) {
        return MessageType::boolean();
    }

    std::optional<MessageType> check_node(CtorLit& lit, Expr& e, const std::optional<MessageType>& expected) {
        if (expected && expected->kind() == MessageType::Kind::Enumeration) {
            if (auto idx = expected->constructor_index(lit.constructor)) {
                lit.resolved_index = *idx;
                return *expected;
            }
        }
        auto owners = env_.enums_with_constructor(lit.constructor);
        if (owners.empty()) {
            error(e.span, "unknown constructor '" + lit.constructor + "'");
            return std::nullopt;
        }
        if (owners.size() > 1) {
            error(e.span, "constructor '" + lit.constructor + "' is declared by several enumerations");
            return std::nullopt;
        }
        lit.resolved_index = *owners.front()->constructor_index(lit.constructor);
        return *owners.front();
    }

    std::optional<MessageType> check_node(VarRead& var, Expr& e, const std::optional<MessageType>&) {
        if (const auto* local = spec_.find_local(var.name)) {
            var.kind = VarKind::Local;
            return local->type;
        }
        if (choices_) {
            for (const auto& c : *choices_)
                if (c.var == var.name) {
                    if (!allow_choice_vars_) {
                        error(e.span, "choice variable '" + var.name + "' may not appear in a guard");
                        return std::nullopt;
                    }
                    var.kind = VarKind::Choice;
                    return MessageType::nat();
                }
        }
        error(e.span, "unknown variable '" + var.name + "'");
        return std::nullopt;
    }

    std::optional<MessageType> check_node(IntervalRead& read, Expr& e, const std::optional<MessageType>&) {
        const ChannelDecl* chan = spec_.find_channel(read.channel);
        if (!chan) {
            error(e.span, "unknown channel '" + read.channel + "'");
            return std::nullopt;
        }
        if (only_channel_) {
            if (chan != only_channel_) {
                error(e.span, "predicate may only read channel '" + only_channel_->name + "'");
                return std::nullopt;
            }
        } else if (chan->polarity != Polarity::In) {
            error(e.span, "cannot read output channel '" + read.channel + "'");
            return std::nullopt;
        }
        return MessageType::list(chan->type);
    }

    std::optional<MessageType> check_node(FtExpr& ft, Expr& e, const std::optional<MessageType>&) {
        auto arg = check(ft.arg, std::nullopt);
        if (!arg)
            return std::nullopt;
        if (arg->kind() != MessageType::Kind::List) {
            error(e.span, "ft expects an interval or list, got " + arg->to_string());
            return std::nullopt;
        }
        return arg->element();
    }

    std::optional<MessageType> check_node(ListExpr& list, Expr& e, const std::optional<MessageType>& expected) {
        std::optional<MessageType> elem;
        if (expected) {
            if (expected->kind() != MessageType::Kind::List) {
                error(e.span, "expected " + expected->to_string() + ", got a list");
                return std::nullopt;
            }
            elem = expected->element();
        }
        if (!elem && list.elements.empty()) {
            error(e.span, "cannot infer the element type of <> here");
            return std::nullopt;
        }
        for (auto& el : list.elements) {
            auto t = check(el, elem);
            if (!elem)
                elem = t;
        }
        if (!elem)
            return std::nullopt;
        return MessageType::list(*elem);
    }

    std::optional<MessageType> check_node(NotExpr& n, Expr&, const std::optional<MessageType>&) {
        check(n.arg, MessageType::boolean());
        return MessageType::boolean();
    }

    std::optional<MessageType> check_node(BinExpr& bin, Expr& e, const std::optional<MessageType>&) {
        switch (bin.op) {
        case BinOp::Add:
        case BinOp::Sub:
            check(bin.lhs, MessageType::nat());
            check(bin.rhs, MessageType::nat());
            return MessageType::nat();
        case BinOp::Lt:
        case BinOp::Le:
        case BinOp::Gt:
        case BinOp::Ge:
            check(bin.lhs, MessageType::nat());
            check(bin.rhs, MessageType::nat());
            return MessageType::boolean();
        case BinOp::Eq:
        case BinOp::Ne: {
            if (is_weak_literal(bin.lhs) && !is_weak_literal(bin.rhs)) {
                auto rt = check(bin.rhs, std::nullopt);
                check(bin.lhs, rt);
            } else {
                auto lt = check(bin.lhs, std::nullopt);
                if (lt)
                    check(bin.rhs, lt);
                else
                    check(bin.rhs, std::nullopt);
            }
            return MessageType::boolean();
        }
        case BinOp::And:
        case BinOp::Or:
        case BinOp::Implies:
            check(bin.lhs, MessageType::boolean());
            check(bin.rhs, MessageType::boolean());
            return MessageType::boolean();
        }
        error(e.span, "unknown operator");
        return std::nullopt;
    }

    std::optional<MessageType> check_node(IfExpr& ife, Expr&, const std::optional<MessageType>& expected) {
        check(ife.cond, MessageType::boolean());
        if (expected) {
            check(ife.then_branch, expected);
            check(ife.else_branch, expected);
            return expected;
        }
        if (is_weak_literal(ife.then_branch) && !is_weak_literal(ife.else_branch)) {
            auto et = check(ife.else_branch, std::nullopt);
            check(ife.then_branch, et);
            return et;
        }
        auto tt = check(ife.then_branch, std::nullopt);
        check(ife.else_branch, tt);
        return tt;
    }

    void error(const SourceSpan& span, std::string message) {
        diags_.push_back({Severity::Error, std::move(message), span});
    }

    const ComponentSpec& spec_;
    const TypeEnv& env_;
    std::vector<Diagnostic>& diags_;
    const ChannelDecl* only_channel_ = nullptr;
    const std::vector<ChooseBinding>* choices_ = nullptr;
    bool allow_choice_vars_ = false;
};

// Evaluates the literal fragment (numbers, booleans, constructors, lists)
// used by local inits, initial guarantees, and external generators.
inline std::optional<Message> eval_literal(const ExprPtr& e, const MessageType& expected,
                                           std::vector<Diagnostic>& diags) {
    if (!e)
        return std::nullopt;
    if (const auto* num = std::get_if<NumLit>(&e->node)) {
        if (expected.kind() == MessageType::Kind::Nat)
            return Message::nat(num->value);
        if (expected.kind() == MessageType::Kind::Bit && num->value <= 1)
            return Message::bit(num->value);
        diags.push_back({Severity::Error, "literal does not fit type " + expected.to_string(), e->span});
        return std::nullopt;
    }
    if (const auto* b = std::get_if<BoolLit>(&e->node)) {
        if (expected.kind() == MessageType::Kind::Bool)
            return Message::boolean(b->value);
        diags.push_back({Severity::Error, "boolean literal does not fit type " + expected.to_string(), e->span});
        return std::nullopt;
    }
    if (const auto* v = std::get_if<VarRead>(&e->node)) {
        // bare identifiers in literal position are constructor names
        if (expected.kind() == MessageType::Kind::Enumeration && expected.constructor_index(v->name)) {
            std::string name = v->name;
            e->node = CtorLit{name};
            return Message::enumerated(expected, name);
        }
        diags.push_back({Severity::Error,
                         "unknown constructor '" + v->name + "' for type " + expected.to_string(), e->span});
        return std::nullopt;
    }
    if (const auto* c = std::get_if<CtorLit>(&e->node)) {
        if (expected.kind() == MessageType::Kind::Enumeration && expected.constructor_index(c->constructor))
            return Message::enumerated(expected, c->constructor);
        diags.push_back(
            {Severity::Error, "unknown constructor '" + c->constructor + "' for type " + expected.to_string(),
             e->span});
        return std::nullopt;
    }
    if (const auto* l = std::get_if<ListExpr>(&e->node)) {
        if (expected.kind() != MessageType::Kind::List) {
            diags.push_back({Severity::Error, "list literal does not fit type " + expected.to_string(), e->span});
            return std::nullopt;
        }
        std::vector<Message> elems;
        for (const auto& el : l->elements) {
            auto m = eval_literal(el, expected.element(), diags);
            if (!m)
                return std::nullopt;
            elems.push_back(std::move(*m));
        }
        return Message::list(expected.element(), std::move(elems));
    }
    diags.push_back({Severity::Error, "expected a literal value", e->span});
    return std::nullopt;
}

inline std::optional<TimeInterval> eval_literal_interval(const std::vector<ExprPtr>& elements,
                                                         const MessageType& element_type,
                                                         std::vector<Diagnostic>& diags) {
    std::vector<Message> msgs;
    for (const auto& e : elements) {
        auto m = eval_literal(e, element_type, diags);
        if (!m)
            return std::nullopt;
        msgs.push_back(std::move(*m));
    }
    return TimeInterval(std::move(msgs));
}

inline bool label_matches(const std::string& label, char letter) {
    if (label.size() < 2 || label[0] != letter)
        return false;
    for (size_t i = 1; i < label.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(label[i])))
            return false;
    return true;
}

inline Nat label_number(const std::string& label) {
    Nat n = 0;
    for (size_t i = 1; i < label.size(); ++i)
        n = n * 10 + static_cast<Nat>(label[i] - '0');
    return n;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Component validation
// ---------------------------------------------------------------------------

// Structural and type validation; resolves literal types and freezes init
// values in place. Empty result means the spec satisfies every invariant.
inline std::vector<Diagnostic> validate_spec(ComponentSpec& spec, const TypeEnv& env) {
    std::vector<Diagnostic> diags;
    auto error = [&](const SourceSpan& span, std::string msg) {
        diags.push_back({Severity::Error, std::move(msg), span});
    };
    auto warning = [&](const SourceSpan& span, std::string msg) {
        diags.push_back({Severity::Warning, std::move(msg), span});
    };

    std::set<std::string> channel_names;
    for (const auto& c : spec.channels)
        if (!channel_names.insert(c.name).second)
            error(c.span, "duplicate channel name '" + c.name + "'");

    std::set<std::string> local_names;
    for (auto& l : spec.locals) {
        if (!local_names.insert(l.name).second)
            error(l.span, "duplicate local variable '" + l.name + "'");
        if (channel_names.count(l.name))
            error(l.span, "local variable '" + l.name + "' shadows a channel");
        auto init = detail::eval_literal(l.init, l.type, diags);
        if (init)
            l.init_value = std::move(*init);
    }

    // Labels: A* for assumptions; I*/B* for guarantees, unique, and
    // conventionally ascending.
    std::set<std::string> labels;
    Nat last_a = 0;
    for (const auto& a : spec.assumptions) {
        if (!detail::label_matches(a.label, 'A'))
            error(a.span, "assumption label '" + a.label + "' must be A1, A2, ...");
        else {
            if (!labels.insert(a.label).second)
                error(a.span, "duplicate label '" + a.label + "'");
            Nat n = detail::label_number(a.label);
            if (n <= last_a)
                warning(a.span, "assumption labels not ascending at '" + a.label + "'");
            last_a = n;
        }
    }
    Nat last_i = 0, last_b = 0;
    for (const auto& g : spec.guarantees) {
        const std::string& label = g.label();
        char letter = std::holds_alternative<InitialGuarantee>(g.node) ? 'I' : 'B';
        SourceSpan span = std::visit([](const auto& x) { return x.span; }, g.node);
        if (!detail::label_matches(label, letter)) {
            error(span, std::string("label '") + label + "' must be " + letter + "1, " + letter + "2, ...");
            continue;
        }
        if (!labels.insert(label).second)
            error(span, "duplicate label '" + label + "'");
        Nat n = detail::label_number(label);
        Nat& last = letter == 'I' ? last_i : last_b;
        if (n <= last)
            warning(span, std::string("labels not ascending at '") + label + "'");
        last = n;
    }

    auto check_pred = [&](const LabeledPred& lp, Polarity wanted, bool allow_stream_eq) {
        const char* side = wanted == Polarity::In ? "input" : "output";
        auto channel_of = [&](const std::string& name, const SourceSpan& span) -> const ChannelDecl* {
            const auto* chan = spec.find_channel(name);
            if (!chan) {
                error(span, "unknown channel '" + name + "' in predicate");
                return nullptr;
            }
            if (chan->polarity != wanted) {
                error(span, std::string("predicate channel '") + name + "' must be an " + side + " channel");
                return nullptr;
            }
            return chan;
        };
        if (const auto* ts = std::get_if<TsPred>(&lp.pred.node)) {
            channel_of(ts->channel, lp.span);
        } else if (const auto* msg = std::get_if<MsgPred>(&lp.pred.node)) {
            channel_of(msg->channel, lp.span);
        } else if (const auto* ip = std::get_if<IntervalPred>(&lp.pred.node)) {
            if (const auto* chan = channel_of(ip->channel, lp.span)) {
                detail::ExprChecker checker(spec, env, diags);
                checker.restrict_to_channel(chan);
                checker.check(ip->predicate, MessageType::boolean());
            }
        } else if (const auto* eq = std::get_if<StreamEqPred>(&lp.pred.node)) {
            if (!allow_stream_eq) {
                error(lp.span, "stream equality is only available as a guarantee");
                return;
            }
            const auto* l = channel_of(eq->left, lp.span);
            const auto* r = channel_of(eq->right, lp.span);
            if (l && r && l->type != r->type)
                error(lp.span, "stream equality over differently typed channels");
        }
    };

    for (const auto& a : spec.assumptions)
        check_pred(a, Polarity::In, false);

    std::set<std::string> initial_channels;
    for (auto& g : spec.guarantees) {
        if (auto* ig = std::get_if<InitialGuarantee>(&g.node)) {
            const auto* chan = spec.find_channel(ig->channel);
            if (!chan) {
                error(ig->span, "unknown channel '" + ig->channel + "' in initial guarantee");
                continue;
            }
            if (chan->polarity != Polarity::Out) {
                error(ig->span, "initial guarantee on non-output channel '" + ig->channel + "'");
                continue;
            }
            if (spec.causality != Causality::StronglyCausal)
                error(ig->span, "initial guarantees require a strongly causal component");
            if (!initial_channels.insert(ig->channel).second)
                error(ig->span, "second initial guarantee for channel '" + ig->channel + "'");
            auto iv = detail::eval_literal_interval(ig->elements, chan->type, diags);
            if (iv)
                ig->value = std::move(*iv);
        } else if (auto* p = std::get_if<LabeledPred>(&g.node)) {
            check_pred(*p, Polarity::Out, true);
        } else if (auto* rule = std::get_if<TransitionRule>(&g.node)) {
            std::set<std::string> choice_names;
            for (const auto& c : rule->choices) {
                if (!choice_names.insert(c.var).second)
                    error(c.span, "duplicate choice variable '" + c.var + "'");
                if (local_names.count(c.var) || channel_names.count(c.var))
                    error(c.span, "choice variable '" + c.var + "' shadows another name");
                if (c.lo > c.hi)
                    error(c.span, "empty choice range " + std::to_string(c.lo) + ".." + std::to_string(c.hi));
            }
            if (rule->guard) {
                detail::ExprChecker checker(spec, env, diags);
                checker.set_choices(&rule->choices);
                checker.set_allow_choice_vars(false);
                checker.check(rule->guard, MessageType::boolean());
            }

            detail::ExprChecker effects(spec, env, diags);
            effects.set_choices(&rule->choices);
            effects.set_allow_choice_vars(true);

            // Duplicate-target detection: a second assignment to a target
            // already assigned on some path duplicates on that path.
            auto check_block = [&](auto&& self, EffectBlock& block,
                                   std::set<std::string> assigned) -> std::set<std::string> {
                for (auto& item : block.items) {
                    if (auto* assign = std::get_if<Assignment>(&item.node)) {
                        if (const auto* local = spec.find_local(assign->target)) {
                            assign->target_kind = AssignTargetKind::Local;
                            if (assign->index_form != OutIndexForm::None)
                                error(assign->span, "interval index on local variable assignment");
                            effects.check(assign->value, local->type);
                        } else if (const auto* chan = spec.find_channel(assign->target)) {
                            assign->target_kind = AssignTargetKind::Output;
                            if (chan->polarity != Polarity::Out) {
                                error(assign->span, "assignment to input channel '" + assign->target + "'");
                                continue;
                            }
                            if (assign->index_form == OutIndexForm::Cur &&
                                spec.causality == Causality::StronglyCausal)
                                error(assign->span,
                                      "strongly causal output must be written at t+1, not t");
                            if (assign->index_form == OutIndexForm::Next &&
                                spec.causality == Causality::WeaklyCausal)
                                error(assign->span, "weakly causal output must be written at t, not t+1");
                            effects.check(assign->value, MessageType::list(chan->type));
                        } else {
                            error(assign->span, "unknown assignment target '" + assign->target + "'");
                            continue;
                        }
                        std::string key =
                            (assign->target_kind == AssignTargetKind::Local ? "v:" : "o:") + assign->target;
                        if (!assigned.insert(key).second)
                            error(assign->span, "second assignment to '" + assign->target + "' in rule '" +
                                                    rule->label + "'");
                    } else {
                        auto& ife = std::get<IfEffect>(item.node);
                        effects.check(ife.cond, MessageType::boolean());
                        auto then_set = self(self, ife.then_branch, assigned);
                        auto else_set = self(self, ife.else_branch, assigned);
                        assigned = std::move(then_set);
                        assigned.insert(else_set.begin(), else_set.end());
                    }
                }
                return assigned;
            };
            check_block(check_block, rule->effect, {});
        }
    }

    return diags;
}

// ---------------------------------------------------------------------------
// Network validation and scheduling
// ---------------------------------------------------------------------------

class SpecRegistry {
public:
    TypeEnv& types() { return types_; }
    const TypeEnv& types() const { return types_; }

    void add(ComponentSpec spec) { specs_[spec.name] = std::move(spec); }

    const ComponentSpec* find(const std::string& name) const {
        auto it = specs_.find(name);
        return it == specs_.end() ? nullptr : &it->second;
    }

private:
    TypeEnv types_;
    std::map<std::string, ComponentSpec> specs_;
};

// Order in which components fire within one interval: every weakly causal
// component after all producers of its same-step inputs. Strongly causal
// consumers impose no same-step edge (their inputs are read after the
// whole sweep). Returns indices into net.instances.
inline std::vector<Nat> topological_order(const Network& net) {
    const Nat n = net.instances.size();
    std::map<std::string, Nat> index;
    for (Nat i = 0; i < n; ++i)
        index[net.instances[i].name] = i;

    std::vector<std::vector<Nat>> successors(n);
    std::vector<Nat> in_degree(n, 0);
    for (const auto& w : net.wires) {
        Nat from = index.at(w.from_instance);
        Nat to = index.at(w.to_instance);
        if (net.instances[to].spec.causality == Causality::WeaklyCausal && from != to) {
            successors[from].push_back(to);
            ++in_degree[to];
        }
    }

    std::vector<Nat> order;
    order.reserve(n);
    std::set<Nat> ready;
    for (Nat i = 0; i < n; ++i)
        if (in_degree[i] == 0)
            ready.insert(i);
    while (!ready.empty()) {
        Nat next = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(next);
        for (Nat succ : successors[next])
            if (--in_degree[succ] == 0)
                ready.insert(succ);
    }
    if (order.size() != n) {
        std::string cycle;
        for (Nat i = 0; i < n; ++i)
            if (in_degree[i] > 0)
                cycle += (cycle.empty() ? "" : ", ") + net.instances[i].name;
        throw CausalityCycleError("zero-delay causality cycle through: " + cycle);
    }
    return order;
}

// Resolves instance specs from the registry and checks the wiring: every
// input fed exactly once, types matching, monitors bound, zero-delay graph
// acyclic.
inline std::vector<Diagnostic> validate_network(Network& net, const SpecRegistry& registry) {
    std::vector<Diagnostic> diags;
    auto error = [&](const SourceSpan& span, std::string msg) {
        diags.push_back({Severity::Error, std::move(msg), span});
    };

    std::set<std::string> instance_names;
    for (auto& inst : net.instances) {
        if (!instance_names.insert(inst.name).second)
            error(inst.span, "duplicate instance name '" + inst.name + "'");
        const auto* spec = registry.find(inst.spec_name);
        if (!spec) {
            error(inst.span, "unknown component '" + inst.spec_name + "'");
            continue;
        }
        inst.spec = *spec;
    }
    if (has_errors(diags))
        return diags;

    auto out_channel = [&](const std::string& inst_name, const std::string& chan_name,
                           const SourceSpan& span) -> const ChannelDecl* {
        const auto* inst = net.find_instance(inst_name);
        if (!inst) {
            error(span, "unknown instance '" + inst_name + "'");
            return nullptr;
        }
        const auto* chan = inst->spec.find_channel(chan_name);
        if (!chan || chan->polarity != Polarity::Out) {
            error(span, "'" + inst_name + "." + chan_name + "' is not an output channel");
            return nullptr;
        }
        return chan;
    };

    std::set<std::pair<std::string, std::string>> fed;
    auto in_channel = [&](const std::string& inst_name, const std::string& chan_name,
                          const SourceSpan& span) -> const ChannelDecl* {
        const auto* inst = net.find_instance(inst_name);
        if (!inst) {
            error(span, "unknown instance '" + inst_name + "'");
            return nullptr;
        }
        const auto* chan = inst->spec.find_channel(chan_name);
        if (!chan || chan->polarity != Polarity::In) {
            error(span, "'" + inst_name + "." + chan_name + "' is not an input channel");
            return nullptr;
        }
        if (!fed.insert({inst_name, chan_name}).second) {
            error(span, "input '" + inst_name + "." + chan_name + "' is fed twice");
            return nullptr;
        }
        return chan;
    };

    for (const auto& w : net.wires) {
        const auto* to = in_channel(w.to_instance, w.to_channel, w.span);
        const auto* from = out_channel(w.from_instance, w.from_channel, w.span);
        if (to && from && to->type != from->type)
            error(w.span, "wire type mismatch: '" + w.from_instance + "." + w.from_channel + "' is " +
                              from->type.to_string() + ", '" + w.to_instance + "." + w.to_channel + "' is " +
                              to->type.to_string());
    }

    for (auto& ext : net.externals) {
        const auto* to = in_channel(ext.to_instance, ext.to_channel, ext.span);
        if (!to)
            continue;
        ext.generator.intervals.clear();
        for (const auto& iv_exprs : ext.generator.interval_exprs) {
            auto iv = detail::eval_literal_interval(iv_exprs, to->type, diags);
            if (iv)
                ext.generator.intervals.push_back(std::move(*iv));
        }
    }

    for (const auto& inst : net.instances)
        for (const auto* in : inst.spec.inputs())
            if (!fed.count({inst.name, in->name}))
                error(inst.span, "unwired input channel '" + inst.name + "." + in->name + "'");

    for (auto& mon : net.monitors) {
        const auto* spec = registry.find(mon.spec_name);
        if (!spec) {
            error(mon.span, "unknown monitor component '" + mon.spec_name + "'");
            continue;
        }
        mon.spec = *spec;
        if (!mon.spec.rules().empty())
            error(mon.span, "monitor '" + mon.name + "' must not contain transition rules");
        std::set<std::string> bound;
        for (const auto& [spec_chan, from_inst, from_chan] : mon.binds) {
            const auto* chan = mon.spec.find_channel(spec_chan);
            if (!chan) {
                error(mon.span, "monitor '" + mon.name + "' has no channel '" + spec_chan + "'");
                continue;
            }
            bound.insert(spec_chan);
            const auto* from = out_channel(from_inst, from_chan, mon.span);
            if (from && from->type != chan->type)
                error(mon.span, "monitor binding type mismatch on '" + spec_chan + "'");
        }
        for (const auto& c : mon.spec.channels)
            if (!bound.count(c.name))
                error(mon.span, "monitor channel '" + mon.name + "." + c.name + "' is not bound");
    }

    if (!has_errors(diags)) {
        try {
            topological_order(net);
        } catch (const CausalityCycleError& e) {
            error(net.span, e.what());
        }
    }
    return diags;
}

// ---------------------------------------------------------------------------
// Stream table (derived view used by the runtime, trace io, and export)
// ---------------------------------------------------------------------------

struct StreamInfo {
    std::string display_name;
    MessageType type;
    bool external = false;
    Nat producer_instance = 0;  // meaningful when !external
    std::string producer_channel;
    Nat external_index = 0;  // index into net.externals when external
    std::vector<std::pair<Nat, std::string>> consumers;  // (instance index, input channel)
};

// Indexed view of a validated network: one entry per stream (every output
// channel plus every external stimulus), consumer lookup tables, and the
// firing order.
class NetworkIndex {
public:
    explicit NetworkIndex(const Network& net) : net_(&net) {
        std::map<std::string, Nat> instance_index;
        for (Nat i = 0; i < net.instances.size(); ++i)
            instance_index[net.instances[i].name] = i;

        for (Nat i = 0; i < net.instances.size(); ++i)
            for (const auto* out : net.instances[i].spec.outputs()) {
                stream_of_producer_[{net.instances[i].name, out->name}] = streams_.size();
                streams_.push_back({out->name, out->type, false, i, out->name, 0, {}});
            }
        for (Nat e = 0; e < net.externals.size(); ++e) {
            const auto& ext = net.externals[e];
            Nat inst = instance_index.at(ext.to_instance);
            const auto* chan = net.instances[inst].spec.find_channel(ext.to_channel);
            stream_of_producer_[{"<ext>", ext.to_instance + "." + ext.to_channel}] = streams_.size();
            streams_.push_back({ext.to_channel, chan->type, true, inst, ext.to_channel, e, {}});
        }

        // Display names: bare channel name unless it collides, then
        // qualified with the producing (or fed) instance.
        std::map<std::string, Nat> name_count;
        for (const auto& s : streams_)
            ++name_count[s.display_name];
        for (auto& s : streams_)
            if (name_count[s.display_name] > 1) {
                Nat inst = s.producer_instance;
                s.display_name = net.instances[inst].name + "." + s.display_name;
            }

        input_stream_.resize(net.instances.size());
        for (Nat i = 0; i < net.instances.size(); ++i)
            input_stream_[i].resize(net.instances[i].spec.inputs().size(), 0);

        auto input_slot = [&](const std::string& inst_name, const std::string& chan) -> std::pair<Nat, Nat> {
            Nat i = instance_index.at(inst_name);
            auto ins = net.instances[i].spec.inputs();
            for (Nat k = 0; k < ins.size(); ++k)
                if (ins[k]->name == chan)
                    return {i, k};
            throw ConfigError("no input '" + chan + "' on '" + inst_name + "'");
        };

        for (const auto& w : net.wires) {
            Nat s = stream_of_producer_.at({w.from_instance, w.from_channel});
            auto [inst, slot] = input_slot(w.to_instance, w.to_channel);
            input_stream_[inst][slot] = s;
            streams_[s].consumers.push_back({inst, w.to_channel});
        }
        for (Nat e = 0; e < net.externals.size(); ++e) {
            const auto& ext = net.externals[e];
            Nat s = stream_of_producer_.at({"<ext>", ext.to_instance + "." + ext.to_channel});
            auto [inst, slot] = input_slot(ext.to_instance, ext.to_channel);
            input_stream_[inst][slot] = s;
            streams_[s].consumers.push_back({inst, ext.to_channel});
        }

        order_ = topological_order(net);
    }

    const Network& network() const { return *net_; }
    const std::vector<StreamInfo>& streams() const { return streams_; }
    const std::vector<Nat>& firing_order() const { return order_; }

    Nat stream_of_output(const std::string& instance, const std::string& channel) const {
        auto it = stream_of_producer_.find({instance, channel});
        if (it == stream_of_producer_.end())
            throw ConfigError("no stream produced by '" + instance + "." + channel + "'");
        return it->second;
    }

    // Stream feeding the given input slot (index into the spec's inputs()).
    Nat input_stream(Nat instance, Nat input_slot) const { return input_stream_[instance][input_slot]; }

    std::optional<Nat> stream_by_display_name(const std::string& name) const {
        for (Nat i = 0; i < streams_.size(); ++i)
            if (streams_[i].display_name == name)
                return i;
        return std::nullopt;
    }

private:
    const Network* net_;
    std::vector<StreamInfo> streams_;
    std::map<std::pair<std::string, std::string>, Nat> stream_of_producer_;
    std::vector<std::vector<Nat>> input_stream_;
    std::vector<Nat> order_;
};

}  // namespace focusst
