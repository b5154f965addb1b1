#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace snm {

enum class Phase { SupportRound, PiRound };
enum class Direction { Downlink, Uplink };

std::string to_string(Phase phase);
std::string to_string(Direction dir);

/// One center<->machine message as seen by the ledger.
struct MessageRecord {
  Phase phase = Phase::SupportRound;
  Direction direction = Direction::Downlink;
  std::uint32_t machine_id = 0;
  std::int64_t n_indices = 0;
  std::int64_t bits = 0;

  friend bool operator==(const MessageRecord&, const MessageRecord&) = default;
};

/// Bit counts of one trial. No framing bits are modelled: a message costs
/// exactly its payload, and an empty reply costs 0 bits while still being
/// recorded in the trace.
class BitLedger {
 public:
  explicit BitLedger(bool keep_trace = false) : keep_trace_(keep_trace) {}

  void record(const MessageRecord& msg);

  std::int64_t downlink_bits() const { return downlink_[0] + downlink_[1]; }
  std::int64_t uplink_bits() const { return uplink_[0] + uplink_[1]; }
  std::int64_t downlink_bits(Phase phase) const { return downlink_[slot(phase)]; }
  std::int64_t uplink_bits(Phase phase) const { return uplink_[slot(phase)]; }
  std::int64_t total_bits() const { return downlink_bits() + uplink_bits(); }

  bool keeps_trace() const { return keep_trace_; }
  const std::vector<MessageRecord>& trace() const { return trace_; }

  /// Adds another ledger's counts (and trace, if both keep one).
  BitLedger& operator+=(const BitLedger& other);

 private:
  static std::size_t slot(Phase phase) { return phase == Phase::SupportRound ? 0 : 1; }

  bool keep_trace_ = false;
  std::int64_t downlink_[2] = {0, 0};
  std::int64_t uplink_[2] = {0, 0};
  std::vector<MessageRecord> trace_;
};

/// "phase\tdirection\tmachine_id\tn_indices\tbits".
std::string format_trace_line(const MessageRecord& msg);
/// Inverse of format_trace_line; throws std::invalid_argument on bad input.
MessageRecord parse_trace_line(const std::string& line);

void write_trace(std::ostream& out, const std::vector<MessageRecord>& trace);
/// Reads every non-comment line; lines starting with '#' are skipped.
std::vector<MessageRecord> read_trace(std::istream& in);

/// Replays a trace into a fresh ledger.
BitLedger replay(const std::vector<MessageRecord>& trace);

}  // namespace snm
