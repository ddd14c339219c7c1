#pragma once

// Hash-chained record of accepted matches, one block per matching round.
//
// Block digest: SHA-256 over the big-endian serialization
//   height:u64 | prev_hash:32B | round:u64 | winner:u32 | tx_count:u64 |
//   tx_count x (round:u64 | rider:u64 | driver:u64 | utility bits:u64)
// with transactions in ascending rider-id order. The genesis block links to
// the all-zero digest.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pom/core.hpp"
#include "pom/rideshare.hpp"

namespace pom::ledger {

using Digest = std::array<std::uint8_t, 32>;

inline constexpr Digest kZeroDigest{};

std::string to_hex(const Digest& d);
Digest digest_from_hex(const std::string& hex);

struct Transaction {
    std::uint64_t round = 0;
    std::uint64_t rider_id = 0;
    std::uint64_t driver_id = 0;
    double utility = 0.0;

    friend bool operator==(const Transaction&, const Transaction&) = default;
};

struct Block {
    std::uint64_t height = 0;
    Digest prev_hash{};
    std::uint64_t round = 0;
    SolverId winner;
    std::vector<Transaction> transactions;   // ascending rider id
    Digest hash{};
};

using Chain = std::vector<Block>;

void canonicalize(std::vector<Transaction>& txs);

// Digest of the block's content fields; ignores block.hash.
Digest compute_hash(const Block& block);

Chain append_block(Chain chain, std::uint64_t round, SolverId winner,
                   std::vector<Transaction> transactions);

// Index of the first block whose height, linkage or digest is wrong.
std::optional<std::size_t> verify_chain(std::span<const Block> chain);

struct RoundContext {
    std::uint64_t round = 0;
    SolverId winner;
    const ride::MatchingInstance* instance = nullptr;
    const ride::MatchingSolution* winning_solution = nullptr;
    const ride::RiderResponses* responses = nullptr;
};

enum class RejectReason {
    None,
    WrongRound,
    WrongWinner,
    UnknownMatch,     // transaction not among the accepted matches
    Incomplete,       // an accepted match is missing
    BadHash,
};

struct BlockValidation {
    RejectReason reason = RejectReason::None;
    std::string detail;

    bool accepted() const { return reason == RejectReason::None; }
};

const char* to_string(RejectReason reason);

// Check performed by the round's non-winners.
BlockValidation validate_block(const Block& block, const RoundContext& context);

std::vector<Transaction> transactions_for(std::uint64_t round,
                                          const ride::MatchingInstance& instance,
                                          const ride::RiderResponses& responses);

// Line-delimited export:
//   # pom-chain v1
//   <height> <round> <winner> <prev_hash> <hash> <n> [<rider>:<driver>:<utility bits hex>]...
void export_chain(std::ostream& out, std::span<const Block> chain);
Chain import_chain(std::istream& in);

} // namespace pom::ledger
