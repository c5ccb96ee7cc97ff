#pragma once

// Versioned JSON files for MDPs, policies, heuristics, value tables and
// transition datasets, plus the CSV writers for learning curves and
// decomposition reports. Numeric arrays are row-major and flattened; every
// double is written in shortest round-trip form, so load(save(x)) == x
// bit for bit.
//
// Loaders throw ParseError (with line or field context) on malformed input
// and VersionError on an unknown schema version.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include "hurl/analysis.hpp"
#include "hurl/heuristics.hpp"
#include "hurl/learners.hpp"
#include "hurl/mdp.hpp"

namespace hurl::io {

inline constexpr int kSchemaVersion = 1;

std::string mdp_to_json(const TabularMdp& mdp);
TabularMdp mdp_from_json(std::string_view text, const std::string& source = "<mdp>");
void save_mdp(const std::filesystem::path& path, const TabularMdp& mdp);
TabularMdp load_mdp(const std::filesystem::path& path);

std::string heuristic_to_json(const Heuristic& h);
Heuristic heuristic_from_json(std::string_view text, const std::string& source = "<heuristic>");
void save_heuristic(const std::filesystem::path& path, const Heuristic& h);
Heuristic load_heuristic(const std::filesystem::path& path);

std::string policy_to_json(const Policy& pi);
Policy policy_from_json(std::string_view text, const std::string& source = "<policy>");
void save_policy(const std::filesystem::path& path, const Policy& pi);
Policy load_policy(const std::filesystem::path& path);

std::string dataset_to_json(const TransitionDataset& data);
TransitionDataset dataset_from_json(std::string_view text,
                                    const std::string& source = "<dataset>");
void save_dataset(const std::filesystem::path& path, const TransitionDataset& data);
TransitionDataset load_dataset(const std::filesystem::path& path);

std::string value_to_json(const ValueFn& v);
ValueFn value_from_json(std::string_view text, const std::string& source = "<value>");
void save_value(const std::filesystem::path& path, const ValueFn& v);
ValueFn load_value(const std::filesystem::path& path);

std::string q_to_json(const QFn& q);
QFn q_from_json(std::string_view text, const std::string& source = "<q>");
void save_q(const std::filesystem::path& path, const QFn& q);
QFn load_q(const std::filesystem::path& path);

/// Shortest decimal string that parses back to exactly `x`.
std::string format_number(double x);

inline constexpr std::string_view kCurveHeader =
    "iteration,lambda,return_undiscounted,return_discounted,env_steps";
void write_curve_csv(std::ostream& out, const LearningCurve& curve);
void write_curve_csv(const std::filesystem::path& path, const LearningCurve& curve);

inline constexpr std::string_view kDecompositionHeader =
    "lambda,v_star_d0,v_pi_d0,regret,bias,gap_identity_regret,bias_upper_bound_C,"
    "bias_upper_bound_linf,epsilon,reshaped_gap_d0,reshaped_gap_occupancy,optimal_gap_d0,"
    "heuristic_gap,identity_residual";
void write_decomposition_csv(std::ostream& out, std::span<const DecompositionReport> reports);

/// Whole file as a string; ParseError when it cannot be read.
std::string read_text(const std::filesystem::path& path);
/// Truncates and writes; throws Error when the file cannot be written.
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace hurl::io
