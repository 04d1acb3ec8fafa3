#pragma once

// Cross-checks of symbolic critical records against the numeric oracle.
// A record is matched by an oracle cluster when the two agree on the record's
// rigid vertices up to a proper motion; Bott-Morse records match many clusters.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "linkarea/critical.hpp"
#include "linkarea/oracle.hpp"

namespace linkarea {

struct RecordCheck {
  std::size_t record = 0;
  std::string kind_key;
  int index = 0;
  int manifold_dim = 0;
  std::optional<InertiaTriple> at_representative;
  std::size_t clusters_matched = 0;
  std::vector<std::string> problems;
};

struct VerifyReport {
  std::vector<RecordCheck> records;
  std::size_t clusters = 0;
  std::vector<std::size_t> unmatched_clusters;
  std::vector<std::string> problems;
  bool ok() const { return problems.empty(); }
};

struct VerifyOptions {
  OracleOptions oracle;
  double match_tol = 1e-5;   // times total length
  double area_rel = 1e-8;
  bool completeness = true;  // run the seeded search as well
};

inline std::string describe(const InertiaTriple& t) {
  return std::to_string(t.negative) + "/" + std::to_string(t.zero) + "/" + std::to_string(t.positive);
}

inline VerifyReport verify_records(const LinkageGraph& g, const std::vector<VertexId>& gamma,
                                   const std::vector<CriticalRecord>& records, const VerifyOptions& opts = {}) {
  VerifyReport out;
  const AngleChart chart(g);
  const TrigObjective obj = area_objective(chart, gamma);
  const double total = g.total_length();

  for (std::size_t i = 0; i < records.size(); ++i) {
    const CriticalRecord& r = records[i];
    RecordCheck rc;
    rc.record = i;
    rc.kind_key = r.kind_key;
    rc.index = r.index.index;
    rc.manifold_dim = r.manifold_dim;
    if (!realizes(g, r.representative, 1e-8)) rc.problems.push_back("representative does not realize the lengths");
    const double s = oriented_area(r.representative, gamma);
    if (std::abs(s - r.area) > opts.area_rel * std::max(1.0, std::abs(s)))
      rc.problems.push_back("area " + std::to_string(r.area) + " but representative gives " + std::to_string(s));
    try {
      rc.at_representative = constrained_inertia(chart, obj, r.representative, opts.oracle);
      if (rc.at_representative->negative != r.index.index || rc.at_representative->zero != r.manifold_dim)
        rc.problems.push_back("index " + std::to_string(r.index.index) + " dim " + std::to_string(r.manifold_dim) +
                              " but oracle inertia " + describe(*rc.at_representative));
    } catch (const Error& e) {
      rc.problems.push_back(std::string("oracle rejects representative: ") + e.what());
    }
    out.records.push_back(std::move(rc));
  }

  if (opts.completeness) {
    const auto found = find_critical_numeric(chart, obj, opts.oracle);
    out.clusters = found.size();
    for (std::size_t k = 0; k < found.size(); ++k) {
      bool matched = false;
      for (std::size_t i = 0; i < records.size(); ++i) {
        if (aligned_distance(records[i].representative, found[k].configuration, records[i].rigid_vertices) >
            opts.match_tol * total)
          continue;
        matched = true;
        RecordCheck& rc = out.records[i];
        ++rc.clusters_matched;
        if (found[k].inertia.negative != rc.index || found[k].inertia.zero != rc.manifold_dim)
          rc.problems.push_back("matching cluster has inertia " + describe(found[k].inertia));
      }
      if (!matched) out.unmatched_clusters.push_back(k);
    }
    for (std::size_t k : out.unmatched_clusters)
      out.problems.push_back("oracle critical point with S = " + std::to_string(found[k].value) + " and inertia " +
                             describe(found[k].inertia) + " has no record");
    for (auto& rc : out.records)
      if (rc.clusters_matched == 0) rc.problems.push_back("not found by the seeded search");
  }
  for (const auto& rc : out.records)
    for (const auto& p : rc.problems) out.problems.push_back("record " + std::to_string(rc.record) + " (" + rc.kind_key + "): " + p);
  return out;
}

}  // namespace linkarea
