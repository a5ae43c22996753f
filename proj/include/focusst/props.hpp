#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "focusst/operators.hpp"
#include "focusst/reference.hpp"
#include "focusst/runtime.hpp"
#include "focusst/stream.hpp"

namespace focusst {

// Randomized law checking for the operator algebra and the reference
// controllers, exposed through the props command. Failures are shrunk to a
// small counterexample before reporting.

struct PropOptions {
    Nat trials = 1000;
    Nat seed = 0;
    bool inject_failure = false;  // harness self-test: adds a false property
};

struct PropReport {
    std::string name;
    Nat trials = 0;
    Nat failures = 0;
    std::string counterexample;  // first failure, shrunk

    bool passed() const { return failures == 0; }
};

namespace detail {

inline TimedStreamPrefix random_bit_stream(Rng& rng, Nat max_len = 8, Nat max_msgs = 3) {
    TimedStreamPrefix s(MessageType::bit());
    Nat len = rng.range(0, max_len);
    for (Nat t = 0; t < len; ++t) {
        std::vector<Message> msgs;
        Nat k = rng.range(0, max_msgs);
        for (Nat i = 0; i < k; ++i)
            msgs.push_back(Message::bit(rng.range(0, 1)));
        s.append(TimeInterval(std::move(msgs)));
    }
    return s;
}

// greedy shrink: keep removing one interval or one message while the
// predicate still fails
inline TimedStreamPrefix shrink_stream(TimedStreamPrefix failing,
                                       const std::function<bool(const TimedStreamPrefix&)>& fails) {
    bool progress = true;
    while (progress) {
        progress = false;
        for (Nat t = 0; t < failing.length(); ++t) {
            TimedStreamPrefix candidate(failing.element_type());
            for (Nat u = 0; u < failing.length(); ++u)
                if (u != t)
                    candidate.append(failing.interval_at(u));
            if (fails(candidate)) {
                failing = std::move(candidate);
                progress = true;
                break;
            }
        }
        if (progress)
            continue;
        for (Nat t = 0; t < failing.length() && !progress; ++t) {
            const auto& iv = failing.interval_at(t);
            for (Nat m = 0; m < iv.size(); ++m) {
                TimedStreamPrefix candidate(failing.element_type());
                for (Nat u = 0; u < failing.length(); ++u) {
                    if (u != t) {
                        candidate.append(failing.interval_at(u));
                        continue;
                    }
                    std::vector<Message> kept;
                    for (Nat x = 0; x < iv.size(); ++x)
                        if (x != m)
                            kept.push_back(iv.at(x));
                    candidate.append(TimeInterval(std::move(kept)));
                }
                if (fails(candidate)) {
                    failing = std::move(candidate);
                    progress = true;
                    break;
                }
            }
        }
    }
    return failing;
}

// independent cumulative-count route for the timestamp operator
inline std::optional<Nat> timestamp_by_scan(const TimedStreamPrefix& s, Nat k) {
    Nat count = 0;
    for (Nat t = 0; t < s.length(); ++t) {
        for (Nat i = 0; i < s.interval_at(t).size(); ++i)
            if (++count == k)
                return t;
    }
    return std::nullopt;
}

// a stream-shaped property: generated input, failure predicate
struct StreamLaw {
    std::string name;
    std::function<bool(const TimedStreamPrefix&, Rng&)> fails;
};

inline PropReport run_stream_property(const StreamLaw& prop, const PropOptions& opts, Nat salt) {
    PropReport report{prop.name, opts.trials, 0, ""};
    for (Nat trial = 0; trial < opts.trials; ++trial) {
        Rng rng(opts.seed * 0x9E3779B9ULL + salt * 0x10001ULL + trial);
        TimedStreamPrefix s = random_bit_stream(rng);
        Rng probe = rng;
        if (prop.fails(s, probe)) {
            ++report.failures;
            if (report.counterexample.empty()) {
                auto fails_fn = [&](const TimedStreamPrefix& c) {
                    Rng again(opts.seed * 0x9E3779B9ULL + salt * 0x10001ULL + trial);
                    (void)random_bit_stream(again);  // keep the draw sequence aligned
                    return prop.fails(c, again);
                };
                TimedStreamPrefix minimal = shrink_stream(s, fails_fn);
                report.counterexample = minimal.to_string();
            }
        }
    }
    return report;
}

inline std::vector<Nat> shrink_levels(std::vector<Nat> failing,
                                      const std::function<bool(const std::vector<Nat>&)>& fails) {
    bool progress = true;
    while (progress) {
        progress = false;
        for (size_t i = 0; i < failing.size(); ++i) {
            std::vector<Nat> candidate;
            for (size_t j = 0; j < failing.size(); ++j)
                if (j != i)
                    candidate.push_back(failing[j]);
            if (!candidate.empty() && fails(candidate)) {
                failing = std::move(candidate);
                progress = true;
                break;
            }
        }
    }
    return failing;
}

}  // namespace detail

// Single-component network driving one controller variant with a fixed
// water-level prefix; used by the equivalence property.
inline Network controller_probe_network(const ComponentSpec& controller, const std::vector<Nat>& levels) {
    Network net;
    net.name = "ControllerProbe";
    net.instances.push_back({"Controller", controller.name, controller, {}});
    ExternalBinding ext;
    ext.to_instance = "Controller";
    ext.to_channel = "waterLevel";
    ext.generator.kind = GeneratorKind::Hold;
    for (Nat v : levels)
        ext.generator.intervals.push_back(TimeInterval({Message::nat(v)}));
    net.externals.push_back(std::move(ext));
    return net;
}

struct ControllerTrajectories {
    TimedStreamPrefix control_signal;
    std::vector<std::vector<Message>> pump_history;
};

inline ControllerTrajectories run_controller(const ComponentSpec& controller,
                                             const std::vector<Nat>& levels, Nat seed = 0) {
    Network net = controller_probe_network(controller, levels);
    NetworkIndex index(net);
    Trace trace = run(index, levels.size(), seed);
    return {trace.stream("controlSignal"), trace.local_history.front()};
}

inline std::vector<PropReport> run_properties(const PropOptions& opts) {
    std::vector<PropReport> reports;
    Nat salt = 1;

    detail::StreamLaw round_trip{
        "join(split(s, n, policy), n) = s",
        [](const TimedStreamPrefix& s, Rng& rng) {
            Nat n = rng.range(1, 5);
            for (SplitPolicy p : {SplitPolicy::First, SplitPolicy::Last, SplitPolicy::Distribute})
                if (join(split(s, n, p), n).stream != s)
                    return true;
            return false;
        }};
    reports.push_back(detail::run_stream_property(round_trip, opts, salt++));

    detail::StreamLaw order{
        "split preserves the flattened message order",
        [](const TimedStreamPrefix& s, Rng& rng) {
            Nat n = rng.range(1, 5);
            for (SplitPolicy p : {SplitPolicy::First, SplitPolicy::Last, SplitPolicy::Distribute})
                if (split(s, n, p).flatten() != s.flatten())
                    return true;
            return false;
        }};
    reports.push_back(detail::run_stream_property(order, opts, salt++));

    detail::StreamLaw ts_oracle{
        "timestamp agrees with the cumulative-count scan",
        [](const TimedStreamPrefix& s, Rng& rng) {
            Nat k = rng.range(1, s.message_count() + 2);
            return timestamp(s, k) != detail::timestamp_by_scan(s, k);
        }};
    reports.push_back(detail::run_stream_property(ts_oracle, opts, salt++));

    detail::StreamLaw filter_laws{
        "filter is idempotent and commutes with join",
        [](const TimedStreamPrefix& s, Rng& rng) {
            std::vector<Message> set;
            if (rng.range(0, 1))
                set.push_back(Message::bit(0));
            if (rng.range(0, 1))
                set.push_back(Message::bit(1));
            TimedStreamPrefix once = filter(set, s);
            if (filter(set, once) != once)
                return true;
            Nat n = rng.range(1, 4);
            return filter(set, join(s, n).stream) != join(filter(set, s), n).stream;
        }};
    reports.push_back(detail::run_stream_property(filter_laws, opts, salt++));

    detail::StreamLaw ts_implies_msg{
        "ts(s) implies msg(s, 1)",
        [](const TimedStreamPrefix& s, Rng&) { return ts_holds(s) && !msg_holds(s, 1); }};
    reports.push_back(detail::run_stream_property(ts_implies_msg, opts, salt++));

    // controller-variant equivalence over random level prefixes
    {
        PropReport report{"controller rule and if-then-else variants agree", opts.trials, 0, ""};
        try {
            auto rules = load_reference("steamboiler-rules");
            auto ifte = load_reference("steamboiler-ifthenelse");
            const ComponentSpec& spec_a = rules.network.find_instance("Controller")->spec;
            const ComponentSpec& spec_b = ifte.network.find_instance("Controller")->spec;
            auto differs = [&](const std::vector<Nat>& levels) {
                auto a = run_controller(spec_a, levels);
                auto b = run_controller(spec_b, levels);
                return a.control_signal != b.control_signal || a.pump_history != b.pump_history;
            };
            for (Nat trial = 0; trial < opts.trials; ++trial) {
                Rng rng(opts.seed * 0x51AF3ULL + trial);
                std::vector<Nat> levels;
                Nat len = rng.range(1, 8);
                for (Nat i = 0; i < len; ++i)
                    levels.push_back(rng.range(0, 1000));
                if (differs(levels)) {
                    ++report.failures;
                    if (report.counterexample.empty()) {
                        auto minimal = detail::shrink_levels(levels, differs);
                        std::string text = "waterLevel = [";
                        for (size_t i = 0; i < minimal.size(); ++i) {
                            if (i)
                                text += ", ";
                            text += "<" + std::to_string(minimal[i]) + ">";
                        }
                        report.counterexample = text + "]";
                    }
                }
            }
        } catch (const Error& e) {
            report.failures = 1;
            report.counterexample = e.what();
        }
        reports.push_back(std::move(report));
    }

    if (opts.inject_failure) {
        detail::StreamLaw bogus{
            "INJECTED: split(s, 2, First) has no empty sub-interval",
            [](const TimedStreamPrefix& s, Rng&) {
                TimedStreamPrefix r = split(s, 2, SplitPolicy::First);
                for (const auto& iv : r.intervals())
                    if (iv.empty())
                        return true;
                return false;
            }};
        reports.push_back(detail::run_stream_property(bogus, opts, salt++));
    }

    return reports;
}

inline bool all_passed(const std::vector<PropReport>& reports) {
    for (const auto& r : reports)
        if (!r.passed())
            return false;
    return true;
}

}  // namespace focusst
