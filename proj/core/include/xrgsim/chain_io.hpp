#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "xrgsim/block.hpp"
#include "xrgsim/token.hpp"

namespace xrg {

struct ChainIoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Writes the chain as JSON Lines, one block per line, with a fixed key
/// order, so identical chains serialize byte-identically.  Import reverses
/// it exactly; hashes are carried verbatim and checked by validate_chain,
/// not here.
void export_chain(const Chain& chain, std::ostream& out);
void export_chain_file(const Chain& chain, const std::string& path);

/// Throws ChainIoError on malformed input (bad JSON, missing fields,
/// unknown kinds, malformed hex).
Chain import_chain(std::istream& in);
Chain import_chain_file(const std::string& path);

/// One audit line: the full token state as of the given block height.
void append_token_snapshot(std::ostream& out, const TokenState& token,
                           std::uint64_t height);

}  // namespace xrg
