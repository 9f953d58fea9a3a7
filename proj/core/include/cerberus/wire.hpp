#pragma once

// JSON bodies for the moderator HTTP endpoints (protocol version 1).
//
// Binary values are lowercase hex of their canonical encodings. Every object
// carries exactly the listed fields; unknown or missing fields make the body
// malformed.
//
// POST /v1/token/round1
//   request  {"version":1,"requests":[{"id_src","x1","r","pk_eph","issued_at"}...]}
//   response {"version":1,"results":[{"session_id","commitment":{"index","hiding","binding"}}
//                                    | {"error":<reason>}...]}
// POST /v1/token/round2
//   request  {"version":1,"items":[{"session_id","roster":[{"index","hiding","binding"}...]}...]}
//   response {"version":1,"results":[{"index","z"} | {"error":<reason>}...]}
// POST /v1/report
//   request  {"version":1,"envelope":{"message","token":{"x1","pk_eph","issued_at","sig_mod"},
//                                     "x2","sig_src"}}
//   response {"version":1,"vote":"approve","index","d"} | {"version":1,"vote":"deny"}
//
// Whole-request failures use a non-2xx status with body {"error":<reason>}.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cerberus/elgamal.hpp"
#include "cerberus/protocol.hpp"
#include "cerberus/schnorr.hpp"

namespace cerberus::wire {

inline constexpr int kVersion = 1;

inline constexpr std::string_view kRound1Path = "/v1/token/round1";
inline constexpr std::string_view kRound2Path = "/v1/token/round2";
inline constexpr std::string_view kReportPath = "/v1/report";

/// Body failed to parse or violated the schema.
class MalformedBody : public EncodingError {
 public:
  using EncodingError::EncodingError;
};

using SessionId = std::array<std::uint8_t, 16>;

/// Per-item or whole-request refusal, e.g. "bad-encryption".
struct Rejection {
  std::string reason;
  bool operator==(const Rejection&) const = default;
};

struct Round1Accepted {
  SessionId session_id;
  NonceCommitment commitment;
};
using Round1Result = std::variant<Round1Accepted, Rejection>;

struct Round2Item {
  SessionId session_id;
  std::vector<NonceCommitment> roster;
};
using Round2Result = std::variant<SignatureShare, Rejection>;

struct Denied {};
using ReportResult = std::variant<DecryptionShare, Denied>;

std::string encode_round1_request(std::span<const TokenRequest> requests);
std::vector<TokenRequest> decode_round1_request(const Suite& suite, std::string_view body);
std::string encode_round1_response(std::span<const Round1Result> results);
std::vector<Round1Result> decode_round1_response(const Suite& suite, std::string_view body);

std::string encode_round2_request(std::span<const Round2Item> items);
std::vector<Round2Item> decode_round2_request(const Suite& suite, std::string_view body);
std::string encode_round2_response(std::span<const Round2Result> results);
std::vector<Round2Result> decode_round2_response(const Suite& suite, std::string_view body);

std::string encode_report_request(const ReportRequest& report);
ReportRequest decode_report_request(const Suite& suite, std::string_view body);
std::string encode_report_response(const ReportResult& result);
ReportResult decode_report_response(const Suite& suite, std::string_view body);

std::string encode_error(std::string_view reason);
/// Extracts the reason from an {"error":...} body; "malformed" if the body
/// is not one.
std::string decode_error(std::string_view body);

}  // namespace cerberus::wire
