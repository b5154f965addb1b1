#include "snm/ledger.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace snm {
namespace {

template <typename T>
T parse_integer(const std::string& field) {
  T value{};
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw std::invalid_argument("trace: bad integer field '" + field + "'");
  }
  return value;
}

}  // namespace

std::string to_string(Phase phase) {
  return phase == Phase::SupportRound ? "support_round" : "pi_round";
}

std::string to_string(Direction dir) {
  return dir == Direction::Downlink ? "downlink" : "uplink";
}

void BitLedger::record(const MessageRecord& msg) {
  if (msg.bits < 0 || msg.n_indices < 0) {
    throw std::invalid_argument("BitLedger: negative message size");
  }
  auto& bucket = msg.direction == Direction::Downlink ? downlink_ : uplink_;
  bucket[slot(msg.phase)] += msg.bits;
  if (keep_trace_) trace_.push_back(msg);
}

BitLedger& BitLedger::operator+=(const BitLedger& other) {
  for (std::size_t i = 0; i < 2; ++i) {
    downlink_[i] += other.downlink_[i];
    uplink_[i] += other.uplink_[i];
  }
  if (keep_trace_ && other.keep_trace_) {
    trace_.insert(trace_.end(), other.trace_.begin(), other.trace_.end());
  }
  return *this;
}

std::string format_trace_line(const MessageRecord& msg) {
  std::ostringstream out;
  out << to_string(msg.phase) << '\t' << to_string(msg.direction) << '\t'
      << msg.machine_id << '\t' << msg.n_indices << '\t' << msg.bits;
  return out.str();
}

MessageRecord parse_trace_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  if (fields.size() != 5) throw std::invalid_argument("trace: expected 5 fields: " + line);

  MessageRecord msg;
  if (fields[0] == "support_round") {
    msg.phase = Phase::SupportRound;
  } else if (fields[0] == "pi_round") {
    msg.phase = Phase::PiRound;
  } else {
    throw std::invalid_argument("trace: unknown phase '" + fields[0] + "'");
  }
  if (fields[1] == "downlink") {
    msg.direction = Direction::Downlink;
  } else if (fields[1] == "uplink") {
    msg.direction = Direction::Uplink;
  } else {
    throw std::invalid_argument("trace: unknown direction '" + fields[1] + "'");
  }
  msg.machine_id = parse_integer<std::uint32_t>(fields[2]);
  msg.n_indices = parse_integer<std::int64_t>(fields[3]);
  msg.bits = parse_integer<std::int64_t>(fields[4]);
  return msg;
}

void write_trace(std::ostream& out, const std::vector<MessageRecord>& trace) {
  for (const auto& msg : trace) out << format_trace_line(msg) << '\n';
}

std::vector<MessageRecord> read_trace(std::istream& in) {
  std::vector<MessageRecord> trace;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    trace.push_back(parse_trace_line(line));
  }
  return trace;
}

BitLedger replay(const std::vector<MessageRecord>& trace) {
  BitLedger ledger(true);
  for (const auto& msg : trace) ledger.record(msg);
  return ledger;
}

}  // namespace snm
