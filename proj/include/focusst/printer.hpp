#pragma once

#include <string>

#include "focusst/ast.hpp"

namespace focusst {

namespace detail {

// Precedence levels mirror the parser: implies < or < and < not < cmp < add.
inline int expr_precedence(const Expr& e) {
    if (const auto* bin = std::get_if<BinExpr>(&e.node)) {
        switch (bin->op) {
        case BinOp::Implies: return 1;
        case BinOp::Or: return 2;
        case BinOp::And: return 3;
        case BinOp::Lt:
        case BinOp::Le:
        case BinOp::Eq:
        case BinOp::Ge:
        case BinOp::Gt:
        case BinOp::Ne: return 5;
        case BinOp::Add:
        case BinOp::Sub: return 6;
        }
    }
    if (std::holds_alternative<NotExpr>(e.node))
        return 4;
    return 7;
}

inline void print_expr_into(const ExprPtr& e, int min_prec, std::string& out);

inline void print_binary(const BinExpr& bin, int prec, std::string& out) {
    // additive chains are left-associative; implications right-associative
    int lhs_prec = prec;
    int rhs_prec = prec + 1;
    if (bin.op == BinOp::Implies) {
        lhs_prec = prec + 1;
        rhs_prec = prec;
    }
    print_expr_into(bin.lhs, lhs_prec, out);
    out += ' ';
    out += to_string(bin.op);
    out += ' ';
    print_expr_into(bin.rhs, rhs_prec, out);
}

inline void print_expr_into(const ExprPtr& e, int min_prec, std::string& out) {
    if (!e) {
        out += "?";
        return;
    }
    int prec = expr_precedence(*e);
    bool parens = prec < min_prec;
    if (parens)
        out += '(';
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, NumLit>) {
                out += std::to_string(node.value);
            } else if constexpr (std::is_same_v<T, BoolLit>) {
                out += node.value ? "true" : "false";
            } else if constexpr (std::is_same_v<T, CtorLit>) {
                out += node.constructor;
            } else if constexpr (std::is_same_v<T, VarRead>) {
                out += node.name;
            } else if constexpr (std::is_same_v<T, IntervalRead>) {
                out += node.channel;
                out += "[t]";
            } else if constexpr (std::is_same_v<T, FtExpr>) {
                out += "ft(";
                print_expr_into(node.arg, 0, out);
                out += ')';
            } else if constexpr (std::is_same_v<T, ListExpr>) {
                // elements print at additive level, mirroring the parser
                out += '<';
                for (size_t i = 0; i < node.elements.size(); ++i) {
                    if (i)
                        out += ", ";
                    print_expr_into(node.elements[i], 6, out);
                }
                out += '>';
            } else if constexpr (std::is_same_v<T, NotExpr>) {
                out += "not ";
                print_expr_into(node.arg, 4, out);
            } else if constexpr (std::is_same_v<T, BinExpr>) {
                print_binary(node, prec, out);
            } else if constexpr (std::is_same_v<T, IfExpr>) {
                out += "if ";
                print_expr_into(node.cond, 0, out);
                out += " then ";
                print_expr_into(node.then_branch, 0, out);
                out += " else ";
                print_expr_into(node.else_branch, 0, out);
                out += " fi";
            }
        },
        e->node);
    if (parens)
        out += ')';
}

inline std::string print_expr(const ExprPtr& e) {
    std::string out;
    print_expr_into(e, 0, out);
    return out;
}

inline std::string print_assignment(const Assignment& a) {
    std::string out = a.target;
    if (a.target_kind == AssignTargetKind::Local || a.index_form == OutIndexForm::None) {
        if (a.target_kind == AssignTargetKind::Local)
            out += "'";
    } else if (a.index_form == OutIndexForm::Cur) {
        out += "[t]";
    } else {
        out += "[t+1]";
    }
    out += " = ";
    out += print_expr(a.value);
    return out;
}

inline bool block_is_flat(const EffectBlock& block) {
    for (const auto& item : block.items)
        if (!std::holds_alternative<Assignment>(item.node))
            return false;
    return true;
}

inline void print_effect_block(const EffectBlock& block, const std::string& indent, std::string& out);

inline void print_effect_item(const EffectItem& item, const std::string& indent, std::string& out) {
    if (const auto* assign = std::get_if<Assignment>(&item.node)) {
        out += indent + print_assignment(*assign);
        return;
    }
    const auto& ife = std::get<IfEffect>(item.node);
    out += indent + "if " + print_expr(ife.cond) + "\n";
    if (block_is_flat(ife.then_branch)) {
        out += indent + "then ";
        for (size_t i = 0; i < ife.then_branch.items.size(); ++i) {
            if (i)
                out += ", ";
            out += print_assignment(std::get<Assignment>(ife.then_branch.items[i].node));
        }
        out += "\n";
    } else {
        out += indent + "then\n";
        print_effect_block(ife.then_branch, indent + "    ", out);
        out += "\n";
    }
    if (block_is_flat(ife.else_branch)) {
        out += indent + "else ";
        for (size_t i = 0; i < ife.else_branch.items.size(); ++i) {
            if (i)
                out += ", ";
            out += print_assignment(std::get<Assignment>(ife.else_branch.items[i].node));
        }
        out += "\n";
    } else {
        out += indent + "else\n";
        print_effect_block(ife.else_branch, indent + "    ", out);
        out += "\n";
    }
    out += indent + "fi";
}

inline void print_effect_block(const EffectBlock& block, const std::string& indent, std::string& out) {
    for (size_t i = 0; i < block.items.size(); ++i) {
        if (i)
            out += ",\n";
        print_effect_item(block.items[i], indent, out);
    }
}

inline std::string print_pred(const MonitorPred& pred) {
    return std::visit(
        [](const auto& node) -> std::string {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, TsPred>) {
                return "ts(" + node.channel + ")";
            } else if constexpr (std::is_same_v<T, MsgPred>) {
                return "msg(" + node.channel + ", " + std::to_string(node.bound) + ")";
            } else if constexpr (std::is_same_v<T, TruePred>) {
                return "true";
            } else if constexpr (std::is_same_v<T, IntervalPred>) {
                return print_expr(node.predicate);
            } else if constexpr (std::is_same_v<T, StreamEqPred>) {
                return node.left + " = " + node.right;
            }
        },
        pred.node);
}

}  // namespace detail

// Canonical text for a component spec; parsing it back yields an equal AST.
inline std::string pretty_print(const ComponentSpec& spec) {
    std::string out = "spec " + spec.name;
    out += spec.causality == Causality::WeaklyCausal ? " weakly causal\n" : " strongly causal\n";
    for (const auto& c : spec.channels)
        if (c.polarity == Polarity::In)
            out += "in " + c.name + ": " + c.type.to_string() + "\n";
    for (const auto& c : spec.channels)
        if (c.polarity == Polarity::Out)
            out += "out " + c.name + ": " + c.type.to_string() + "\n";
    for (const auto& l : spec.locals)
        out += "local " + l.name + ": " + l.type.to_string() + " = " + detail::print_expr(l.init) + "\n";
    if (!spec.assumptions.empty()) {
        out += "asm\n";
        for (const auto& a : spec.assumptions)
            out += a.label + ": " + detail::print_pred(a.pred) + "\n";
    }
    if (!spec.guarantees.empty()) {
        out += "gar\n";
        for (const auto& g : spec.guarantees) {
            if (const auto* ig = std::get_if<InitialGuarantee>(&g.node)) {
                out += ig->label + ": " + ig->channel + "[0] = <";
                for (size_t i = 0; i < ig->elements.size(); ++i) {
                    if (i)
                        out += ", ";
                    out += detail::print_expr(ig->elements[i]);
                }
                out += ">\n";
            } else if (const auto* p = std::get_if<LabeledPred>(&g.node)) {
                out += p->label + ": " + detail::print_pred(p->pred) + "\n";
            } else {
                const auto& rule = std::get<TransitionRule>(g.node);
                out += rule.label + ":";
                for (const auto& c : rule.choices)
                    out += " choose " + c.var + " in " + std::to_string(c.lo) + ".." + std::to_string(c.hi) +
                           ",";
                if (rule.guard) {
                    out += " " + detail::print_expr(rule.guard) + " ==>\n";
                    detail::print_effect_block(rule.effect, "    ", out);
                    out += "\n";
                } else if (rule.effect.items.size() == 1 &&
                           std::holds_alternative<Assignment>(rule.effect.items.front().node)) {
                    out += " " +
                           detail::print_assignment(std::get<Assignment>(rule.effect.items.front().node)) +
                           "\n";
                } else {
                    out += "\n";
                    detail::print_effect_block(rule.effect, "    ", out);
                    out += "\n";
                }
            }
        }
    }
    return out;
}

inline std::string pretty_print(const TypeDecl& decl) {
    std::string out = "type " + decl.name + " = ";
    if (decl.type.kind() == MessageType::Kind::Enumeration) {
        const auto& ctors = decl.type.constructors();
        for (size_t i = 0; i < ctors.size(); ++i) {
            if (i)
                out += " | ";
            out += ctors[i];
        }
    } else {
        const auto& variants = decl.type.variants();
        for (size_t i = 0; i < variants.size(); ++i) {
            if (i)
                out += " | ";
            out += variants[i].constructor;
            if (!variants[i].fields.empty()) {
                out += "(";
                for (size_t j = 0; j < variants[i].fields.size(); ++j) {
                    if (j)
                        out += ", ";
                    out += variants[i].fields[j].selector + ": " +
                           variants[i].fields[j].field_type().to_string();
                }
                out += ")";
            }
        }
    }
    return out + "\n";
}

inline std::string pretty_print(const Network& net) {
    std::string out = "network " + net.name;
    if (net.post_update_reads)
        out += " post_update";
    out += "\n";
    for (const auto& inst : net.instances) {
        out += "component " + inst.spec_name;
        if (inst.name != inst.spec_name)
            out += " as " + inst.name;
        out += "\n";
    }
    for (const auto& w : net.wires)
        out += "wire " + w.to_instance + "." + w.to_channel + " = " + w.from_instance + "." +
               w.from_channel + "\n";
    for (const auto& ext : net.externals) {
        out += "external " + ext.to_instance + "." + ext.to_channel + " = ";
        switch (ext.generator.kind) {
        case GeneratorKind::Silent: out += "empty"; break;
        case GeneratorKind::Cycle: out += "cycle ["; break;
        case GeneratorKind::Hold: out += "hold ["; break;
        }
        if (ext.generator.kind != GeneratorKind::Silent) {
            for (size_t i = 0; i < ext.generator.interval_exprs.size(); ++i) {
                if (i)
                    out += ", ";
                out += "<";
                const auto& elems = ext.generator.interval_exprs[i];
                for (size_t j = 0; j < elems.size(); ++j) {
                    if (j)
                        out += ", ";
                    out += detail::print_expr(elems[j]);
                }
                out += ">";
            }
            out += "]";
        }
        out += "\n";
    }
    for (const auto& mon : net.monitors) {
        out += "monitor " + mon.spec_name;
        if (mon.name != mon.spec_name)
            out += " as " + mon.name;
        for (const auto& [chan, inst, port] : mon.binds)
            out += " bind " + chan + " = " + inst + "." + port;
        out += "\n";
    }
    return out;
}

inline std::string pretty_print(const SpecFile& file) {
    std::string out;
    bool first = true;
    auto gap = [&] {
        if (!first)
            out += "\n";
        first = false;
    };
    for (const auto& t : file.types) {
        gap();
        out += pretty_print(t);
    }
    for (const auto& s : file.specs) {
        gap();
        out += pretty_print(s);
    }
    for (const auto& n : file.networks) {
        gap();
        out += pretty_print(n);
    }
    return out;
}

}  // namespace focusst
