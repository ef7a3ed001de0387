#include "xrgsim/orders.hpp"

#include <algorithm>
#include <variant>

namespace xrg {

const char* to_string(UseCase uc) {
  switch (uc) {
    case UseCase::PeerToPeer: return "peer_to_peer";
    case UseCase::InterMicrogrid: return "inter_microgrid";
    case UseCase::AncillaryDso: return "ancillary_dso";
    case UseCase::EvCharging: return "ev_charging";
  }
  return "unknown";
}

const char* to_string(AncillaryService s) {
  switch (s) {
    case AncillaryService::SpinningReserve: return "spinning_reserve";
    case AncillaryService::FrequencyRegulation: return "frequency_regulation";
    case AncillaryService::VoltageControl: return "voltage_control";
    case AncillaryService::DemandResponse: return "demand_response";
  }
  return "unknown";
}

std::optional<UseCase> use_case_from_string(std::string_view name) {
  for (const UseCase uc : {UseCase::PeerToPeer, UseCase::InterMicrogrid,
                           UseCase::AncillaryDso, UseCase::EvCharging}) {
    if (name == to_string(uc)) return uc;
  }
  return std::nullopt;
}

std::optional<AncillaryService> ancillary_service_from_string(std::string_view name) {
  for (const AncillaryService s :
       {AncillaryService::SpinningReserve, AncillaryService::FrequencyRegulation,
        AncillaryService::VoltageControl, AncillaryService::DemandResponse}) {
    if (name == to_string(s)) return s;
  }
  return std::nullopt;
}

std::uint64_t RoundWindow::overlap_from(const RoundWindow& other, std::uint64_t from_round) const {
  std::uint64_t lo = std::max({first, other.first, from_round});
  std::uint64_t hi = std::min(last, other.last);
  return hi >= lo ? hi - lo + 1 : 0;
}

UseCase use_case_of(const OrderData& order) {
  struct Visitor {
    UseCase operator()(const Offer& o) const { return o.use_case; }
    UseCase operator()(const Bid& b) const { return b.use_case; }
    UseCase operator()(const AncillaryOffer&) const { return UseCase::AncillaryDso; }
    UseCase operator()(const AncillaryRequirement&) const { return UseCase::AncillaryDso; }
    UseCase operator()(const EvseOffer&) const { return UseCase::EvCharging; }
    UseCase operator()(const EvBid&) const { return UseCase::EvCharging; }
    UseCase operator()(const NetworkConstraint&) const { return UseCase::InterMicrogrid; }
  };
  return std::visit(Visitor{}, order);
}

WattHours ClearingResult::cleared_quantity() const {
  WattHours total = 0;
  for (const Fill& f : fills) total += f.quantity;
  return total;
}

Amount ClearingResult::total_payments() const {
  Amount total = 0;
  for (const Fill& f : fills) total += f.payment;
  return total;
}

}  // namespace xrg
