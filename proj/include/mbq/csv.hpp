#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "mbq/montecarlo.hpp"
#include "mbq/quantizer.hpp"

namespace mbq {

struct RocRow {
  std::string detector;
  std::string bits;
  RocPoint point;
  TheoryPoint theory;
};

inline std::vector<RocRow> roc_rows(const DetectorSpec& d, const RocCurve& roc) {
  std::vector<RocRow> rows;
  for (std::size_t k = 0; k < roc.points.size(); ++k) rows.push_back({d.name(), d.bits_label(), roc.points[k], roc.theory[k]});
  return rows;
}

inline void write_roc_csv(std::ostream& out, const std::vector<RocRow>& rows) {
  out << "detector,q,eta,p_fa_hat,p_d_hat,p_fa_theory,p_d_theory,n0,n1\n";
  for (const auto& r : rows)
    out << r.detector << ',' << r.bits << ',' << format_double(r.point.eta) << ',' << format_double(r.point.p_fa_hat)
        << ',' << format_double(r.point.p_d_hat) << ',' << format_double(r.theory.p_fa) << ','
        << format_double(r.theory.p_d) << ',' << r.point.n0 << ',' << r.point.n1 << '\n';
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "detector,q,snr_db,p_fa_target,eta_asymptotic,p_d_at_asymptotic_eta,p_d_at_empirical_eta,trials\n";
  for (const auto& r : rows)
    out << r.detector << ',' << r.bits << ',' << format_double(r.snr_db) << ',' << format_double(r.p_fa_target) << ','
        << format_double(r.eta_asymptotic) << ',' << format_double(r.p_d_at_asymptotic_eta) << ','
        << format_double(r.p_d_at_empirical_eta) << ',' << r.trials << '\n';
}

struct TheoryRow {
  double p_fa;
  double eta;
  double lambda_f;
  double p_d;
};

inline std::vector<TheoryRow> theory_rows(double lambda_f, const std::vector<double>& p_fa_grid) {
  std::vector<TheoryRow> rows;
  for (double p : p_fa_grid) {
    const double eta = chi2_quantile(p);
    rows.push_back({p, eta, lambda_f, theoretical_pd(lambda_f, p)});
  }
  return rows;
}

inline void write_theory_csv(std::ostream& out, const std::vector<TheoryRow>& rows) {
  out << "p_fa,eta,lambda_f,p_d_theory\n";
  for (const auto& r : rows)
    out << format_double(r.p_fa) << ',' << format_double(r.eta) << ',' << format_double(r.lambda_f) << ','
        << format_double(r.p_d) << '\n';
}

}  // namespace mbq
