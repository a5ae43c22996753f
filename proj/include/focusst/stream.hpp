#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "focusst/core.hpp"
#include "focusst/message.hpp"
#include "focusst/types.hpp"

namespace focusst {

// One discrete step's message list; empty means nothing was transmitted.
// All messages in an interval share one type (the channel's type).
class TimeInterval {
public:
    TimeInterval() = default;

    explicit TimeInterval(std::vector<Message> messages) : messages_(std::move(messages)) {
        for (size_t i = 1; i < messages_.size(); ++i)
            if (messages_[i].type() != messages_[0].type())
                throw TypeError("heterogeneous time interval: " + messages_[0].type().to_string() + " vs " +
                                messages_[i].type().to_string());
    }

    static TimeInterval of(std::initializer_list<Message> messages) {
        return TimeInterval(std::vector<Message>(messages));
    }

    bool empty() const { return messages_.empty(); }
    Nat size() const { return messages_.size(); }
    const std::vector<Message>& messages() const { return messages_; }

    const Message& at(Nat i) const {
        if (i >= messages_.size())
            throw IndexError("message index " + std::to_string(i) + " out of range");
        return messages_[i];
    }

    bool conforms_to(const MessageType& type) const {
        for (const auto& m : messages_)
            if (m.type() != type)
                return false;
        return true;
    }

    bool operator==(const TimeInterval& other) const { return messages_ == other.messages_; }
    bool operator!=(const TimeInterval& other) const { return !(*this == other); }

    std::string to_string() const {
        std::string out = "<";
        for (size_t i = 0; i < messages_.size(); ++i) {
            if (i)
                out += ", ";
            out += messages_[i].to_string();
        }
        return out + ">";
    }

private:
    std::vector<Message> messages_;
};

// First element of a non-empty interval (the ft accessor used in guards).
inline const Message& first_message(const TimeInterval& interval) {
    if (interval.empty())
        throw EmptyIntervalError("first_message on empty interval");
    return interval.messages().front();
}

// The executed portion of a timed stream: a finite sequence of time
// intervals over discrete time, indexed from 0.
class TimedStreamPrefix {
public:
    explicit TimedStreamPrefix(MessageType element_type) : element_type_(std::move(element_type)) {}

    TimedStreamPrefix(MessageType element_type, std::vector<TimeInterval> intervals)
        : element_type_(std::move(element_type)), intervals_(std::move(intervals)) {
        for (const auto& iv : intervals_)
            check_conforms(iv);
    }

    const MessageType& element_type() const { return element_type_; }
    Nat length() const { return intervals_.size(); }
    bool empty() const { return intervals_.empty(); }
    const std::vector<TimeInterval>& intervals() const { return intervals_; }

    void append(TimeInterval interval) {
        check_conforms(interval);
        intervals_.push_back(std::move(interval));
    }

    void reserve(Nat n) { intervals_.reserve(n); }

    const TimeInterval& interval_at(Nat t) const {
        if (t >= intervals_.size())
            throw IndexError("interval index " + std::to_string(t) + " out of range (length " +
                             std::to_string(intervals_.size()) + ")");
        return intervals_[t];
    }

    Nat message_count() const {
        Nat n = 0;
        for (const auto& iv : intervals_)
            n += iv.size();
        return n;
    }

    // All messages in global transmission order.
    std::vector<Message> flatten() const {
        std::vector<Message> out;
        out.reserve(message_count());
        for (const auto& iv : intervals_)
            for (const auto& m : iv.messages())
                out.push_back(m);
        return out;
    }

    bool operator==(const TimedStreamPrefix& other) const {
        return element_type_ == other.element_type_ && intervals_ == other.intervals_;
    }
    bool operator!=(const TimedStreamPrefix& other) const { return !(*this == other); }

    std::string to_string() const {
        std::string out = "<";
        for (size_t i = 0; i < intervals_.size(); ++i) {
            if (i)
                out += ", ";
            out += intervals_[i].to_string();
        }
        return out + ">";
    }

private:
    void check_conforms(const TimeInterval& iv) const {
        if (!iv.conforms_to(element_type_))
            throw TypeError("interval does not conform to stream element type " + element_type_.to_string());
    }

    MessageType element_type_;
    std::vector<TimeInterval> intervals_;
};

inline const TimeInterval& interval_at(const TimedStreamPrefix& s, Nat t) { return s.interval_at(t); }

// msg(s, k): every time interval carries at most k messages.
inline bool msg_holds(const TimedStreamPrefix& s, Nat k) {
    for (const auto& iv : s.intervals())
        if (iv.size() > k)
            return false;
    return true;
}

// ts(s): every time interval carries exactly one message.
inline bool ts_holds(const TimedStreamPrefix& s) {
    for (const auto& iv : s.intervals())
        if (iv.size() != 1)
            return false;
    return true;
}

// An unmaterialized timed stream: a deterministic mapping from interval
// index to interval contents. The runtime only ever takes finite prefixes.
class StreamGenerator {
public:
    using ProduceFn = std::function<TimeInterval(Nat)>;

    StreamGenerator(MessageType element_type, ProduceFn produce)
        : element_type_(std::move(element_type)), produce_(std::move(produce)) {}

    static StreamGenerator constant(const MessageType& type, TimeInterval interval) {
        if (!interval.conforms_to(type))
            throw TypeError("constant generator interval does not conform to " + type.to_string());
        return StreamGenerator(type, [interval](Nat) { return interval; });
    }

    static StreamGenerator silent(const MessageType& type) {
        return StreamGenerator(type, [](Nat) { return TimeInterval(); });
    }

    // Repeats the given intervals cyclically; with no intervals, stays silent.
    static StreamGenerator cycle(const MessageType& type, std::vector<TimeInterval> intervals) {
        check_all(type, intervals);
        if (intervals.empty())
            return silent(type);
        return StreamGenerator(type, [intervals = std::move(intervals)](Nat t) {
            return intervals[t % intervals.size()];
        });
    }

    // Plays the given intervals, then repeats the last one forever.
    static StreamGenerator hold(const MessageType& type, std::vector<TimeInterval> intervals) {
        check_all(type, intervals);
        if (intervals.empty())
            return silent(type);
        return StreamGenerator(type, [intervals = std::move(intervals)](Nat t) {
            return t < intervals.size() ? intervals[t] : intervals.back();
        });
    }

    const MessageType& element_type() const { return element_type_; }

    TimeInterval produce(Nat t) const {
        TimeInterval iv = produce_(t);
        if (!iv.conforms_to(element_type_))
            throw TypeError("generator produced interval not conforming to " + element_type_.to_string());
        return iv;
    }

private:
    static void check_all(const MessageType& type, const std::vector<TimeInterval>& intervals) {
        for (const auto& iv : intervals)
            if (!iv.conforms_to(type))
                throw TypeError("generator interval does not conform to " + type.to_string());
    }

    MessageType element_type_;
    ProduceFn produce_;
};

// Materializes the first n intervals of a generator.
inline TimedStreamPrefix truncate(const StreamGenerator& g, Nat n) {
    TimedStreamPrefix out(g.element_type());
    out.reserve(n);
    for (Nat t = 0; t < n; ++t)
        out.append(g.produce(t));
    return out;
}

}  // namespace focusst
