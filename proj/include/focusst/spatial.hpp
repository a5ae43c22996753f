#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "focusst/core.hpp"

namespace focusst {

// A point in the abstract plane: two Cartesian coordinates over Nat.
struct Space {
    Nat xx = 0;
    Nat yy = 0;

    bool operator==(const Space&) const = default;
};

// An angle in the Cartesian coordinate system, degrees 0..359.
class Direction {
public:
    explicit Direction(Nat angle) : angle_(angle) {
        if (angle > 359)
            throw InvalidArgument("direction angle " + std::to_string(angle) + " outside 0..359");
    }

    Nat angle() const { return angle_; }
    bool operator==(const Direction&) const = default;

private:
    Nat angle_;
};

// The rectangular zone an object may occupy, given by its two corner points.
class Zone {
public:
    Zone(Nat min_x, Nat min_y, Nat max_x, Nat max_y)
        : min_x_(min_x), min_y_(min_y), max_x_(max_x), max_y_(max_y) {
        if (min_x > max_x || min_y > max_y)
            throw InvalidArgument("zone corners out of order");
    }

    Nat min_x() const { return min_x_; }
    Nat min_y() const { return min_y_; }
    Nat max_x() const { return max_x_; }
    Nat max_y() const { return max_y_; }

    bool operator==(const Zone&) const = default;

    std::string to_string() const {
        return "(" + std::to_string(min_x_) + ", " + std::to_string(min_y_) + ", " + std::to_string(max_x_) +
               ", " + std::to_string(max_y_) + ")";
    }

private:
    Nat min_x_, min_y_, max_x_, max_y_;
};

class SpObject;

// Worst-case cover radius of a composite: half the larger bounding-box
// extension of its subcomponents' zones, rounded up.
Nat composite_rad(const std::vector<SpObject>& subs);

// Spatial state of a physical object: center location, speed, heading,
// worst-case radius, and the zone it may occupy. Composite objects carry
// subcomponents and derive their radius from them.
class SpObject {
public:
    static SpObject elementary(std::string name, Nat rad, Space location, Nat speed, Direction direction,
                               Zone rzone) {
        return SpObject(std::move(name), rad, location, speed, direction, rzone, {});
    }

    static SpObject composite(std::string name, Space location, Nat speed, Direction direction, Zone rzone,
                              std::vector<SpObject> subcomponents) {
        Nat rad = composite_rad(subcomponents);
        return SpObject(std::move(name), rad, location, speed, direction, rzone, std::move(subcomponents));
    }

    const std::string& name() const { return name_; }
    Nat rad() const { return rad_; }
    const Space& location() const { return location_; }
    Nat speed() const { return speed_; }
    const Direction& direction() const { return direction_; }
    const Zone& rzone() const { return rzone_; }
    const std::vector<SpObject>& subcomponents() const { return subcomponents_; }
    bool is_composite() const { return !subcomponents_.empty(); }

private:
    SpObject(std::string name, Nat rad, Space location, Nat speed, Direction direction, Zone rzone,
             std::vector<SpObject> subcomponents)
        : name_(std::move(name)),
          rad_(rad),
          location_(location),
          speed_(speed),
          direction_(direction),
          rzone_(rzone),
          subcomponents_(std::move(subcomponents)) {}

    std::string name_;
    Nat rad_;
    Space location_;
    Nat speed_;
    Direction direction_;
    Zone rzone_;
    std::vector<SpObject> subcomponents_;
};

inline Nat composite_rad(const std::vector<SpObject>& subs) {
    if (subs.empty())
        throw InvalidArgument("composite_rad on empty subcomponent list");
    Nat min_x = subs.front().rzone().min_x();
    Nat max_x = subs.front().rzone().max_x();
    Nat min_y = subs.front().rzone().min_y();
    Nat max_y = subs.front().rzone().max_y();
    for (const auto& s : subs) {
        min_x = std::min(min_x, s.rzone().min_x());
        max_x = std::max(max_x, s.rzone().max_x());
        min_y = std::min(min_y, s.rzone().min_y());
        max_y = std::max(max_y, s.rzone().max_y());
    }
    Nat wcx = max_x - min_x;
    Nat wcy = max_y - min_y;
    // Rounded up: rad under-approximating the cover would be unsound.
    return (std::max(wcx, wcy) + 1) / 2;
}

// A spatial constraint the snapshot fails; data, not an error.
struct Violation {
    enum class Kind { MinX, MinY, MaxX, MaxY, MarginX, MarginYMin, MarginXMax, MarginYMax };

    std::string parent;
    std::string child;
    Kind kind;
    Nat parent_bound = 0;
    Nat child_value = 0;

    std::string to_string() const {
        const char* what = "?";
        switch (kind) {
        case Kind::MinX: what = "rzone.minX"; break;
        case Kind::MinY: what = "rzone.minY"; break;
        case Kind::MaxX: what = "rzone.maxX"; break;
        case Kind::MaxY: what = "rzone.maxY"; break;
        case Kind::MarginX: what = "x margin"; break;
        case Kind::MarginYMin: what = "y margin (min side)"; break;
        case Kind::MarginXMax: what = "x margin (max side)"; break;
        case Kind::MarginYMax: what = "y margin (max side)"; break;
        }
        return parent + "/" + child + ": " + what + " bound " + std::to_string(parent_bound) +
               " vs " + std::to_string(child_value);
    }
};

namespace detail {

inline void zone_nesting_into(const SpObject& parent, std::vector<Violation>& out) {
    const auto& pz = parent.rzone();
    for (const auto& child : parent.subcomponents()) {
        const auto& cz = child.rzone();
        if (pz.min_x() > cz.min_x())
            out.push_back({parent.name(), child.name(), Violation::Kind::MinX, pz.min_x(), cz.min_x()});
        if (pz.min_y() > cz.min_y())
            out.push_back({parent.name(), child.name(), Violation::Kind::MinY, pz.min_y(), cz.min_y()});
        if (pz.max_x() < cz.max_x())
            out.push_back({parent.name(), child.name(), Violation::Kind::MaxX, pz.max_x(), cz.max_x()});
        if (pz.max_y() < cz.max_y())
            out.push_back({parent.name(), child.name(), Violation::Kind::MaxY, pz.max_y(), cz.max_y()});
        zone_nesting_into(child, out);
    }
}

inline void margin_into(const SpObject& parent, std::vector<Violation>& out) {
    // The universally quantified bound is hardest at k = rzone.minX, so that
    // single case decides the whole family.
    for (const auto& child : parent.subcomponents()) {
        Nat required = checked_add(parent.rzone().min_x(), child.rad());
        if (required > child.location().xx)
            out.push_back({parent.name(), child.name(), Violation::Kind::MarginX, required,
                           child.location().xx});
        margin_into(child, out);
    }
}

inline void margin_full_box_into(const SpObject& parent, std::vector<Violation>& out) {
    const auto& pz = parent.rzone();
    for (const auto& child : parent.subcomponents()) {
        Nat rad = child.rad();
        const auto& loc = child.location();
        if (checked_add(pz.min_x(), rad) > loc.xx)
            out.push_back({parent.name(), child.name(), Violation::Kind::MarginX,
                           checked_add(pz.min_x(), rad), loc.xx});
        if (checked_add(pz.min_y(), rad) > loc.yy)
            out.push_back({parent.name(), child.name(), Violation::Kind::MarginYMin,
                           checked_add(pz.min_y(), rad), loc.yy});
        if (checked_add(loc.xx, rad) > pz.max_x())
            out.push_back({parent.name(), child.name(), Violation::Kind::MarginXMax, pz.max_x(),
                           checked_add(loc.xx, rad)});
        if (checked_add(loc.yy, rad) > pz.max_y())
            out.push_back({parent.name(), child.name(), Violation::Kind::MarginYMax, pz.max_y(),
                           checked_add(loc.yy, rad)});
        margin_full_box_into(child, out);
    }
}

}  // namespace detail

// Every subcomponent zone must nest inside its parent's zone, at all levels.
inline std::vector<Violation> check_zone_nesting(const SpObject& obj) {
    std::vector<Violation> out;
    detail::zone_nesting_into(obj, out);
    return out;
}

// For every parent/child pair: parent.rzone.minX + child.rad <= child.location.xx.
inline std::vector<Violation> check_margin(const SpObject& obj) {
    std::vector<Violation> out;
    detail::margin_into(obj, out);
    return out;
}

// Extension predicate, off by default: symmetric margin on all four zone
// sides. Not part of the standard constraint set.
inline std::vector<Violation> check_margin_full_box(const SpObject& obj) {
    std::vector<Violation> out;
    detail::margin_full_box_into(obj, out);
    return out;
}

inline bool check_speed_limit(const SpObject& obj, Nat limit) { return obj.speed() <= limit; }

}  // namespace focusst
