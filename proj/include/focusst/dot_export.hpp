#pragma once

#include <string>

#include "focusst/analysis.hpp"
#include "focusst/ast.hpp"

namespace focusst {

// Color scheme for architecture diagrams: component fill by causality,
// stream color by the strongest declared property (ts > msg1 > none).
struct DiagramStyle {
    std::string strongly_causal_color = "blue";
    std::string weakly_causal_color = "green";
    std::string composite_color = "white";
    std::string ts_stream_color = "red";
    std::string msg1_stream_color = "blue";
    std::string default_stream_color = "black";
};

namespace detail {

enum class StreamProperty { None, Msg1, Ts };

inline void note_pred(const MonitorPred& pred, const std::string& channel, StreamProperty& strongest) {
    if (const auto* ts = std::get_if<TsPred>(&pred.node)) {
        if (ts->channel == channel)
            strongest = StreamProperty::Ts;
    } else if (const auto* msg = std::get_if<MsgPred>(&pred.node)) {
        if (msg->channel == channel && msg->bound == 1 && strongest == StreamProperty::None)
            strongest = StreamProperty::Msg1;
    }
}

// Strongest property declared for a wire, from the producer's guarantee
// predicates and the consumer's assumptions.
inline StreamProperty wire_property(const Network& net, const Wire& wire) {
    StreamProperty strongest = StreamProperty::None;
    if (const auto* producer = net.find_instance(wire.from_instance))
        for (const auto* p : producer->spec.guarantee_preds())
            note_pred(p->pred, wire.from_channel, strongest);
    if (const auto* consumer = net.find_instance(wire.to_instance))
        for (const auto& a : consumer->spec.assumptions)
            note_pred(a.pred, wire.to_channel, strongest);
    return strongest;
}

inline std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\')
            out += '\\';
        out += c;
    }
    return out + "\"";
}

}  // namespace detail

// Emits the network architecture as a DOT digraph: one node per component
// filled by causality, one edge per wire colored by the strongest declared
// stream property. The diagram documents the specification, not a run.
inline std::string export_dot(const Network& net, const DiagramStyle& style = {}) {
    std::string out = "digraph " + detail::quote(net.name) + " {\n";
    out += "  rankdir=LR;\n";
    out += "  node [shape=box, style=filled];\n";
    for (const auto& inst : net.instances) {
        const std::string& color = inst.spec.causality == Causality::StronglyCausal
                                       ? style.strongly_causal_color
                                       : style.weakly_causal_color;
        out += "  " + detail::quote(inst.name) + " [fillcolor=" + color + "];\n";
    }
    for (const auto& ext : net.externals)
        out += "  " + detail::quote("env:" + ext.to_instance + "." + ext.to_channel) +
               " [shape=ellipse, fillcolor=lightgray];\n";
    for (const auto& w : net.wires) {
        std::string color;
        switch (detail::wire_property(net, w)) {
        case detail::StreamProperty::Ts: color = style.ts_stream_color; break;
        case detail::StreamProperty::Msg1: color = style.msg1_stream_color; break;
        case detail::StreamProperty::None: color = style.default_stream_color; break;
        }
        out += "  " + detail::quote(w.from_instance) + " -> " + detail::quote(w.to_instance) +
               " [label=" + detail::quote(w.from_channel) + ", color=" + color + "];\n";
    }
    for (const auto& ext : net.externals)
        out += "  " + detail::quote("env:" + ext.to_instance + "." + ext.to_channel) + " -> " +
               detail::quote(ext.to_instance) + " [label=" + detail::quote(ext.to_channel) +
               ", style=dashed];\n";
    out += "}\n";
    return out;
}

}  // namespace focusst
