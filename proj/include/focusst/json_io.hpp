#pragma once

#include <string>

#include <json.hpp>

#include "focusst/analysis.hpp"
#include "focusst/message.hpp"
#include "focusst/runtime.hpp"
#include "focusst/spatial.hpp"
#include "focusst/stream.hpp"

namespace focusst {

// Insertion order is the serialization order; all writers below insert keys
// in a fixed sequence so equal values give byte-identical documents.
using Json = nlohmann::ordered_json;

inline constexpr int kTraceSchemaVersion = 1;

// --- message literals --------------------------------------------------------
// naturals as numbers, booleans as true/false, bits as 0/1, enumeration
// constructors as strings, lists as arrays, records as objects keyed "con"
// plus the selector names

inline Json message_to_json(const Message& m) {
    switch (m.type().kind()) {
    case MessageType::Kind::Nat: return Json(m.nat_value());
    case MessageType::Kind::Bool: return Json(m.bool_value());
    case MessageType::Kind::Bit: return Json(m.bit_value());
    case MessageType::Kind::Enumeration: return Json(m.constructor());
    case MessageType::Kind::List: {
        Json arr = Json::array();
        for (const auto& el : m.list_elements())
            arr.push_back(message_to_json(el));
        return arr;
    }
    case MessageType::Kind::Record: {
        Json obj = Json::object();
        obj["con"] = m.constructor();
        const auto& rec = m.record_value();
        const auto& variant = m.type().variants()[rec.variant];
        for (size_t i = 0; i < variant.fields.size(); ++i)
            obj[variant.fields[i].selector] = message_to_json(rec.fields[i]);
        return obj;
    }
    }
    throw TypeError("unknown message kind");
}

inline Message message_from_json(const MessageType& type, const Json& j) {
    switch (type.kind()) {
    case MessageType::Kind::Nat:
        if (!j.is_number_unsigned())
            throw TypeError("expected a natural number, got " + j.dump());
        return Message::nat(j.get<Nat>());
    case MessageType::Kind::Bool:
        if (!j.is_boolean())
            throw TypeError("expected a boolean, got " + j.dump());
        return Message::boolean(j.get<bool>());
    case MessageType::Kind::Bit:
        if (!j.is_number_unsigned() || j.get<Nat>() > 1)
            throw TypeError("expected a bit 0/1, got " + j.dump());
        return Message::bit(j.get<Nat>());
    case MessageType::Kind::Enumeration:
        if (!j.is_string())
            throw TypeError("expected a constructor name, got " + j.dump());
        return Message::enumerated(type, j.get<std::string>());
    case MessageType::Kind::List: {
        if (!j.is_array())
            throw TypeError("expected a list, got " + j.dump());
        std::vector<Message> elems;
        for (const auto& el : j)
            elems.push_back(message_from_json(type.element(), el));
        return Message::list(type.element(), std::move(elems));
    }
    case MessageType::Kind::Record: {
        if (!j.is_object() || !j.contains("con"))
            throw TypeError("expected a record object with 'con', got " + j.dump());
        std::string ctor = j.at("con").get<std::string>();
        auto idx = type.variant_index(ctor);
        if (!idx)
            throw TypeError("unknown record constructor '" + ctor + "'");
        std::vector<Message> fields;
        for (const auto& field : type.variants()[*idx].fields)
            fields.push_back(message_from_json(field.field_type(), j.at(field.selector)));
        return Message::record(type, ctor, std::move(fields));
    }
    }
    throw TypeError("unknown message kind");
}

// --- stream prefixes ---------------------------------------------------------
// an array of arrays of message literals

inline Json prefix_to_json(const TimedStreamPrefix& s) {
    Json arr = Json::array();
    for (const auto& iv : s.intervals()) {
        Json interval = Json::array();
        for (const auto& m : iv.messages())
            interval.push_back(message_to_json(m));
        arr.push_back(std::move(interval));
    }
    return arr;
}

inline TimedStreamPrefix prefix_from_json(const MessageType& element_type, const Json& j) {
    if (!j.is_array())
        throw TypeError("expected an array of intervals");
    TimedStreamPrefix out(element_type);
    out.reserve(j.size());
    for (const auto& interval : j) {
        if (!interval.is_array())
            throw TypeError("expected an interval array");
        std::vector<Message> msgs;
        for (const auto& m : interval)
            msgs.push_back(message_from_json(element_type, m));
        out.append(TimeInterval(std::move(msgs)));
    }
    return out;
}

// --- traces --------------------------------------------------------------------

inline Json trace_to_json(const Trace& trace) {
    Json j = Json::object();
    j["schema"] = kTraceSchemaVersion;
    j["horizon"] = trace.horizon;
    Json channels = Json::object();
    for (size_t s = 0; s < trace.streams.size(); ++s)
        channels[trace.stream_names[s]] = prefix_to_json(trace.streams[s]);
    j["channels"] = std::move(channels);
    Json choices = Json::array();
    for (const auto& c : trace.choices) {
        Json rec = Json::object();
        rec["step"] = c.step;
        rec["component"] = c.component;
        rec["var"] = c.var;
        rec["value"] = c.value;
        choices.push_back(std::move(rec));
    }
    j["choices"] = std::move(choices);
    Json verdicts = Json::array();
    for (const auto& v : trace.verdicts) {
        Json rec = Json::object();
        rec["label"] = v.label;
        rec["status"] = to_string(v.status);
        if (v.first_violation_step)
            rec["firstViolationStep"] = *v.first_violation_step;
        if (!v.detail.empty())
            rec["detail"] = v.detail;
        verdicts.push_back(std::move(rec));
    }
    j["verdicts"] = std::move(verdicts);
    return j;
}

inline std::string trace_to_string(const Trace& trace) { return trace_to_json(trace).dump(2) + "\n"; }

// Rebuilds a trace from its JSON form, typing each channel against the
// network it came from. Verdicts in the document are not trusted; run the
// monitor over the result instead.
inline Trace trace_from_json(const Json& j, const NetworkIndex& index) {
    if (!j.is_object() || !j.contains("schema"))
        throw ConfigError("not a trace file (missing schema field)");
    if (j.at("schema").get<int>() != kTraceSchemaVersion)
        throw ConfigError("unsupported trace schema version");
    Trace trace;
    trace.horizon = j.at("horizon").get<Nat>();
    const auto& channels = j.at("channels");
    for (const auto& info : index.streams()) {
        if (!channels.contains(info.display_name))
            throw ConfigError("trace lacks channel '" + info.display_name + "'");
        auto prefix = prefix_from_json(info.type, channels.at(info.display_name));
        if (prefix.length() != trace.horizon)
            throw ConfigError("channel '" + info.display_name + "' does not span the horizon");
        trace.stream_names.push_back(info.display_name);
        trace.streams.push_back(std::move(prefix));
    }
    if (j.contains("choices"))
        for (const auto& rec : j.at("choices"))
            trace.choices.push_back({rec.at("step").get<Nat>(), rec.at("component").get<std::string>(),
                                     rec.at("var").get<std::string>(), rec.at("value").get<Nat>()});
    return trace;
}

// --- sp-object snapshots ---------------------------------------------------------

inline Json spobject_to_json(const SpObject& obj) {
    Json j = Json::object();
    j["name"] = obj.name();
    j["rad"] = obj.rad();
    j["location"] = Json::object({{"xx", obj.location().xx}, {"yy", obj.location().yy}});
    j["speed"] = obj.speed();
    j["direction"] = obj.direction().angle();
    j["rzone"] = Json::object({{"minX", obj.rzone().min_x()},
                               {"minY", obj.rzone().min_y()},
                               {"maxX", obj.rzone().max_x()},
                               {"maxY", obj.rzone().max_y()}});
    Json subs = Json::array();
    for (const auto& s : obj.subcomponents())
        subs.push_back(spobject_to_json(s));
    j["subcomponents"] = std::move(subs);
    return j;
}

inline SpObject spobject_from_json(const Json& j) {
    Space location{j.at("location").at("xx").get<Nat>(), j.at("location").at("yy").get<Nat>()};
    Direction direction(j.at("direction").get<Nat>());
    const auto& z = j.at("rzone");
    Zone rzone(z.at("minX").get<Nat>(), z.at("minY").get<Nat>(), z.at("maxX").get<Nat>(),
               z.at("maxY").get<Nat>());
    std::vector<SpObject> subs;
    for (const auto& s : j.at("subcomponents"))
        subs.push_back(spobject_from_json(s));
    if (subs.empty())
        return SpObject::elementary(j.at("name").get<std::string>(), j.at("rad").get<Nat>(), location,
                                    j.at("speed").get<Nat>(), direction, rzone);
    return SpObject::composite(j.at("name").get<std::string>(), location, j.at("speed").get<Nat>(),
                               direction, rzone, std::move(subs));
}

}  // namespace focusst
