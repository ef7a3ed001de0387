#pragma once

#include <cstdint>

namespace xrg {

/// Token amounts are integers in the smallest unit; 1 XRG = 10^6 units.
/// Quantities are integer watt-hours (energy) or watts (power, capacity).
using Amount = std::int64_t;
using WattHours = std::int64_t;
using Watts = std::int64_t;

/// Prices are smallest-units per kWh (energy) or per kW (capacity).
using Price = std::int64_t;

inline constexpr Amount kUnitsPerXrg = 1'000'000;

constexpr Amount xrg(std::int64_t whole) { return whole * kUnitsPerXrg; }

/// Cost of `quantity_wh` at `units_per_kwh`, rounded down to whole units.
constexpr Amount energy_cost(WattHours quantity_wh, Price units_per_kwh) {
  return static_cast<Amount>((static_cast<__int128>(quantity_wh) * units_per_kwh) / 1000);
}

/// Cost of `capacity_w` at `units_per_kw`, rounded down to whole units.
constexpr Amount capacity_cost(Watts capacity_w, Price units_per_kw) {
  return static_cast<Amount>((static_cast<__int128>(capacity_w) * units_per_kw) / 1000);
}

}  // namespace xrg
