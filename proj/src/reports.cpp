#include "hawkstego/reports.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace hawkstego {

namespace {

constexpr const char* kChannelNames[] = {"r", "g", "b"};

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string shortest(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json psnr_json(double psnr_value) {
  if (std::isinf(psnr_value)) return "inf";
  return psnr_value;
}

}  // namespace

std::string format_psnr(double psnr_value) { return std::isinf(psnr_value) ? "inf" : fixed(psnr_value, 4); }

nlohmann::json quality_to_json(const QualityReport& report) {
  nlohmann::json j;
  j["mse"] = report.mse;
  j["psnr"] = psnr_json(report.psnr);
  j["ssim"] = report.ssim;
  for (int c = 0; c < RasterImage::kChannels; ++c) {
    j[std::string(kChannelNames[c]) + "_l1"] = report.histogram[c].l1;
    j[std::string(kChannelNames[c]) + "_chi_square"] = report.histogram[c].chi_square;
  }
  return j;
}

std::string quality_csv_header() { return "mse,psnr,ssim,r_l1,r_chi_square,g_l1,g_chi_square,b_l1,b_chi_square"; }

std::string quality_csv_row(const QualityReport& report) {
  std::ostringstream row;
  row << shortest(report.mse) << ',' << (std::isinf(report.psnr) ? "inf" : shortest(report.psnr)) << ','
      << shortest(report.ssim);
  for (const auto& h : report.histogram) row << ',' << h.l1 << ',' << shortest(h.chi_square);
  return row.str();
}

std::string quality_summary_line(const QualityReport& report) {
  return "PSNR " + format_psnr(report.psnr) + " dB  SSIM " + fixed(report.ssim, 6) + "  MSE " +
         fixed(report.mse, 6);
}

nlohmann::json embedding_report_json(const EmbeddingOutcome& outcome, OptimizerKind optimizer) {
  const OptimizationResult& opt = outcome.optimization;
  nlohmann::json j;
  j["quality"] = quality_to_json(outcome.quality);
  j["optimizer"] = {
      {"name", std::string(to_string(optimizer))},
      {"iterations_run", opt.iterations_run},
      {"evaluations", opt.evaluations},
      {"best_fitness", opt.best_fitness},
      {"history", opt.history},
  };
  j["payload"] = {
      {"framed_bits", outcome.payload_bits},
      {"capacity_bits", outcome.capacity_bits},
      {"candidate_slots", outcome.candidate_count},
      {"slots_used", outcome.key.slots.size()},
      {"lsb_depth", outcome.key.lsb_depth},
      {"channel_bits", outcome.channel_bits},
  };
  return j;
}

}  // namespace hawkstego
