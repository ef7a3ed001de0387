#pragma once

// JSON shapes shared by the chain exporter and the scenario loader.  This
// header stays inside the build tree: public headers never expose the JSON
// library.

#include <json.hpp>

#include "xrgsim/block.hpp"
#include "xrgsim/orders.hpp"
#include "xrgsim/tx.hpp"

namespace xrg::jsoncodec {

using ordered_json = nlohmann::ordered_json;

ordered_json order_to_json(const OrderData& order);
OrderData order_from_json(const nlohmann::json& j);  // throws ChainIoError

ordered_json transaction_to_json(const Transaction& tx);
Transaction transaction_from_json(const nlohmann::json& j);

ordered_json block_to_json(const Block& block);
Block block_from_json(const nlohmann::json& j);

}  // namespace xrg::jsoncodec
