#pragma once

#include <optional>
#include <vector>

#include "focusst/core.hpp"
#include "focusst/stream.hpp"

namespace focusst {

// Where split places the messages of a source interval within its n result
// sub-intervals.
enum class SplitPolicy {
    First,       // all messages into the first sub-interval
    Last,        // all messages into the last sub-interval
    Distribute,  // message i into sub-interval min(i, n-1), order preserved
};

inline const char* to_string(SplitPolicy p) {
    switch (p) {
    case SplitPolicy::First: return "First";
    case SplitPolicy::Last: return "Last";
    case SplitPolicy::Distribute: return "Distribute";
    }
    return "?";
}

// Refines time granularity: every source interval becomes n result intervals.
// The message multiset and global order are preserved under every policy.
inline TimedStreamPrefix split(const TimedStreamPrefix& s, Nat n, SplitPolicy policy) {
    if (n == 0)
        throw GranularityError("split granularity must be >= 1");
    TimedStreamPrefix out(s.element_type());
    out.reserve(checked_mul(n, s.length()));
    for (const auto& iv : s.intervals()) {
        switch (policy) {
        case SplitPolicy::First:
            out.append(iv);
            for (Nat j = 1; j < n; ++j)
                out.append(TimeInterval());
            break;
        case SplitPolicy::Last:
            for (Nat j = 1; j < n; ++j)
                out.append(TimeInterval());
            out.append(iv);
            break;
        case SplitPolicy::Distribute: {
            std::vector<std::vector<Message>> buckets(n);
            const auto& msgs = iv.messages();
            for (Nat i = 0; i < msgs.size(); ++i)
                buckets[std::min<Nat>(i, n - 1)].push_back(msgs[i]);
            for (auto& b : buckets)
                out.append(TimeInterval(std::move(b)));
            break;
        }
        }
    }
    return out;
}

struct JoinResult {
    TimedStreamPrefix stream;
    // Set when the source length was not a multiple of n: the trailing
    // partial block was joined as-is into one final interval.
    bool padded = false;
};

// Coarsens time granularity: n consecutive source intervals concatenate into
// one result interval.
inline JoinResult join(const TimedStreamPrefix& s, Nat n) {
    if (n == 0)
        throw GranularityError("join granularity must be >= 1");
    TimedStreamPrefix out(s.element_type());
    out.reserve((s.length() + n - 1) / n);
    Nat t = 0;
    bool padded = false;
    while (t < s.length()) {
        Nat block_end = std::min<Nat>(t + n, s.length());
        if (block_end - t < n)
            padded = true;
        std::vector<Message> merged;
        for (Nat i = t; i < block_end; ++i)
            for (const auto& m : s.interval_at(i).messages())
                merged.push_back(m);
        out.append(TimeInterval(std::move(merged)));
        t = block_end;
    }
    return {std::move(out), padded};
}

// Index of the time interval in which the k-th message (counted from 1) is
// transmitted; nothing when the prefix holds fewer than k messages.
inline std::optional<Nat> timestamp(const TimedStreamPrefix& s, Nat k) {
    if (k == 0)
        throw InvalidArgument("timestamp counts messages from 1");
    Nat seen = 0;
    for (Nat t = 0; t < s.length(); ++t) {
        seen += s.interval_at(t).size();
        if (seen >= k)
            return t;
    }
    return std::nullopt;
}

// Keeps, in every interval, exactly the messages that belong to the
// filtering set; order preserved, length unchanged.
inline TimedStreamPrefix filter(const std::vector<Message>& filter_set, const TimedStreamPrefix& s) {
    for (const auto& m : filter_set)
        if (m.type() != s.element_type())
            throw TypeError("filter set member of type " + m.type().to_string() + " on stream of " +
                            s.element_type().to_string());
    TimedStreamPrefix out(s.element_type());
    out.reserve(s.length());
    for (const auto& iv : s.intervals()) {
        std::vector<Message> kept;
        for (const auto& m : iv.messages())
            for (const auto& f : filter_set)
                if (m == f) {
                    kept.push_back(m);
                    break;
                }
        out.append(TimeInterval(std::move(kept)));
    }
    return out;
}

}  // namespace focusst
