#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "chemreward/engine.hpp"
#include "chemreward/grpo.hpp"

namespace chemreward {

/// Reward request line:
///   {"id", "task", "smiles", "label", "response", "fewshot": [{"smiles", "label"}],
///    "weights": {"lambda1", "lambda2", "lambda3"}, "protocol_version"}
/// id, task, fewshot, weights and protocol_version are optional; labels are
/// booleans or "True"/"False". Without "fewshot", examples are retrieved from
/// the engine's store for "task" when one is loaded.
///
/// Response line (keys in this order):
///   {"id", "r_ans", "r_fmt", "r_cons", "r_comp", "r_prin", "r_struct", "r_total",
///    "answer", "format_ok", "protocol_version"}
/// answer is "True", "False" or null.
///
/// Advantage request line: {"prompt_id", "rewards": [...], "protocol_version"?}
/// Advantage response: {"prompt_id", "advantages": [...], "protocol_version"}
///
/// Failures: {"id", "error": {"code", "message", "line"}, "protocol_version"}.

/// One reward request line to one response line (no trailing newline).
/// Never throws; every failure becomes an error object.
std::string handle_reward_line(const Engine& engine, std::string_view line, std::size_t line_no);
std::string handle_advantage_line(std::string_view line, std::size_t line_no);
/// Routes on the presence of "rewards".
std::string handle_line(const Engine& engine, std::string_view line, std::size_t line_no);

enum class BatchKind { Reward, Advantage, Any };

/// JSON Lines in, JSON Lines out, one response per non-blank input line in
/// input order. Lines are numbered from 1 over the whole body.
std::string handle_batch(const Engine& engine, std::string_view body, BatchKind kind = BatchKind::Any,
                         int threads = 1);

/// The response object for an already evaluated request.
std::string breakdown_line(std::string_view id_json, const RewardBreakdown& b);

}  // namespace chemreward
