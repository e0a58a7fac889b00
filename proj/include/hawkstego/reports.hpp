#pragma once

#include <string>

#include <json.hpp>

#include "hawkstego/optimizer.hpp"
#include "hawkstego/quality_metrics.hpp"
#include "hawkstego/stego_engine.hpp"

namespace hawkstego {

/// "inf" for the identical-image sentinel, otherwise fixed 4-decimal dB.
std::string format_psnr(double psnr_value);

/// Flat object: mse, psnr ("inf" when infinite), ssim, then
/// {r,g,b}_l1 and {r,g,b}_chi_square.
nlohmann::json quality_to_json(const QualityReport& report);

/// Column order: mse,psnr,ssim,r_l1,r_chi_square,g_l1,g_chi_square,b_l1,b_chi_square
std::string quality_csv_header();
std::string quality_csv_row(const QualityReport& report);

/// Summary line printed by the embed and metrics commands.
std::string quality_summary_line(const QualityReport& report);

/// Nested report: quality (flat, as above), optimizer summary with history,
/// and payload/capacity figures.
nlohmann::json embedding_report_json(const EmbeddingOutcome& outcome, OptimizerKind optimizer);

}  // namespace hawkstego
