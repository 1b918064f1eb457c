#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace stpinn {

struct Point {
    double x = 0.0;
    double y = 0.0;
    double t = 0.0;

    bool operator==(const Point&) const = default;
};

using PointList = std::vector<Point>;

enum class Axis : std::uint8_t { x = 0, y = 1, t = 2 };

/// Network output and the pure input derivatives residuals may use.
/// Mixed partials are not represented.
template <class S>
struct Jet {
    S u{};
    S ux{};
    S uxx{};
    S uy{};
    S uyy{};
    S ut{};
    S utt{};
};

/// Which derivative channels a batch evaluation must produce. The value
/// channel is always present; a second-order request implies the first.
class ChannelSet {
public:
    constexpr ChannelSet() = default;

    constexpr ChannelSet& with(Axis axis, int order) {
        const auto a = static_cast<int>(axis);
        if (order >= 1) first_[a] = true;
        if (order >= 2) second_[a] = true;
        return *this;
    }

    constexpr bool first(Axis axis) const { return first_[static_cast<int>(axis)]; }
    constexpr bool second(Axis axis) const { return second_[static_cast<int>(axis)]; }

    /// Number of channels including the value.
    constexpr int count() const {
        int n = 1;
        for (int a = 0; a < 3; ++a) n += int(first_[a]) + int(second_[a]);
        return n;
    }

    constexpr ChannelSet operator|(const ChannelSet& o) const {
        ChannelSet r;
        for (int a = 0; a < 3; ++a) {
            r.first_[a] = first_[a] || o.first_[a];
            r.second_[a] = second_[a] || o.second_[a];
        }
        return r;
    }

    constexpr bool operator==(const ChannelSet&) const = default;

private:
    std::array<bool, 3> first_{};
    std::array<bool, 3> second_{};
};

} // namespace stpinn
