#pragma once

#include "xrgsim/address.hpp"
#include "xrgsim/amounts.hpp"

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace xrg {

/// The four transactive-energy market segments.
enum class UseCase : std::uint8_t {
  PeerToPeer = 1,
  InterMicrogrid = 2,
  AncillaryDso = 3,
  EvCharging = 4,
};

enum class AncillaryService : std::uint8_t {
  SpinningReserve = 1,
  FrequencyRegulation = 2,
  VoltageControl = 3,
  DemandResponse = 4,
};

const char* to_string(UseCase uc);
const char* to_string(AncillaryService s);

/// Inverse of to_string; nullopt for unrecognized names.
std::optional<UseCase> use_case_from_string(std::string_view name);
std::optional<AncillaryService> ancillary_service_from_string(std::string_view name);

/// Inclusive round interval, used for EV charging availability.
struct RoundWindow {
  std::uint64_t first = 0;
  std::uint64_t last = 0;

  auto operator<=>(const RoundWindow&) const = default;

  /// Rounds shared with `other`, counting only rounds >= from_round.
  std::uint64_t overlap_from(const RoundWindow& other, std::uint64_t from_round) const;
};

/// Energy sale: excess energy offered at an asking price.
struct Offer {
  Address seller;
  UseCase use_case = UseCase::PeerToPeer;
  WattHours quantity_wh = 0;
  Price unit_price = 0;  // units per kWh
  std::string location;  // feeder node id
  std::uint64_t seq = 0;

  auto operator<=>(const Offer&) const = default;
};

/// Energy purchase: demand plus a total budget. The implied maximum
/// unit price is budget/quantity, compared exactly as a rational.
struct Bid {
  Address buyer;
  UseCase use_case = UseCase::PeerToPeer;
  WattHours quantity_wh = 0;
  Amount budget = 0;
  std::string location;
  std::uint64_t seq = 0;

  auto operator<=>(const Bid&) const = default;
};

struct AncillaryOffer {
  Address provider;
  AncillaryService service = AncillaryService::SpinningReserve;
  Watts capacity_w = 0;
  Price unit_price = 0;  // units per kW
  std::uint64_t seq = 0;

  auto operator<=>(const AncillaryOffer&) const = default;
};

/// Demand for grid support, posted by the DSO only.
struct AncillaryRequirement {
  Address poster;
  AncillaryService service = AncillaryService::SpinningReserve;
  Watts capacity_w = 0;
  Amount budget = 0;
  std::uint64_t seq = 0;

  auto operator<=>(const AncillaryRequirement&) const = default;
};

/// Charging station availability. One vehicle per window.
struct EvseOffer {
  Address station;
  Watts max_power_w = 0;
  RoundWindow window;
  Price unit_price = 0;  // units per kWh
  std::string location;
  std::uint64_t seq = 0;

  auto operator<=>(const EvseOffer&) const = default;
};

struct EvBid {
  Address vehicle;
  WattHours demand_wh = 0;
  Amount budget = 0;
  RoundWindow window;
  std::uint64_t seq = 0;

  auto operator<=>(const EvBid&) const = default;
};

/// Per-edge capacity override posted by the DSO; applies from the round
/// it is posted onward.
struct NetworkConstraint {
  Address poster;
  std::string node_a;
  std::string node_b;
  Watts capacity_w = 0;
  std::uint64_t seq = 0;

  auto operator<=>(const NetworkConstraint&) const = default;
};

/// The data a participant can translate onto the chain.
using OrderData = std::variant<Offer, Bid, AncillaryOffer, AncillaryRequirement,
                               EvseOffer, EvBid, NetworkConstraint>;

/// Which market segment an order belongs to.  Network constraints count
/// toward inter-microgrid, the use case whose flows they gate.
UseCase use_case_of(const OrderData& order);

/// One matched trade. `quantity` is Wh for energy and EV fills, W of
/// capacity for ancillary fills; `unit_price` is per kWh or per kW
/// accordingly. `payment` is the exact amount the buyer owes.
struct Fill {
  Address seller;
  Address buyer;
  std::int64_t quantity = 0;
  Price unit_price = 0;
  Amount payment = 0;

  auto operator<=>(const Fill&) const = default;
};

struct ClearingResult {
  UseCase use_case = UseCase::PeerToPeer;
  std::vector<Fill> fills;
  /// Uniform price for the double-auction use cases; unset otherwise.
  bool has_clearing_price = false;
  Price clearing_price = 0;
  /// Residual orders: partially filled quantities and unspent budgets.
  std::vector<OrderData> unmatched;
  /// Ancillary capacity that could not be procured (W).
  Watts unmet_capacity_w = 0;

  WattHours cleared_quantity() const;
  Amount total_payments() const;
};

}  // namespace xrg
