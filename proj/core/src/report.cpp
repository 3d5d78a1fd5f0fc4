#include "dtdrift/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include <json.hpp>

#include "dtdrift/error.hpp"

namespace dtdrift {

namespace {

MethodSummary summarize_method(const ExperimentResult& r) {
  return {100.0 * r.mean_accuracy(), 100.0 * r.stddev_accuracy(), r.seeds.size()};
}

void check_paired(const ExperimentResult& a, const ExperimentResult& b) {
  if (a.seeds.size() != b.seeds.size()) {
    throw ReportError("'" + a.name + "': baseline and dtd ran different seed counts");
  }
  for (std::size_t i = 0; i < a.seeds.size(); ++i) {
    if (a.seeds[i].seed != b.seeds[i].seed) {
      throw ReportError("'" + a.name + "': baseline and dtd seeds differ");
    }
    if (a.seeds[i].trace.size() != b.seeds[i].trace.size()) {
      throw ReportError("'" + a.name + "': trace lengths differ for seed " +
                        std::to_string(a.seeds[i].seed));
    }
  }
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), pattern, v);
  return buf;
}

}  // namespace

double Report::win_rate() const {
  return paired_cells == 0 ? 0.0
                           : static_cast<double>(wins) / static_cast<double>(paired_cells);
}

double Report::non_loss_rate() const {
  return paired_cells == 0
             ? 0.0
             : static_cast<double>(wins + ties) / static_cast<double>(paired_cells);
}

Report summarize(std::span<const ExperimentResult> results) {
  if (results.empty()) throw ReportError("no results to summarize");
  std::map<std::string, std::pair<const ExperimentResult*, const ExperimentResult*>> by_name;
  std::vector<std::string> order;
  for (const auto& r : results) {
    auto [it, inserted] = by_name.try_emplace(r.name, nullptr, nullptr);
    if (inserted) order.push_back(r.name);
    auto& slot = r.method == Method::kBaseline ? it->second.first : it->second.second;
    if (slot != nullptr) {
      throw ReportError("duplicate " + std::string(to_string(r.method)) + " result for '" +
                        r.name + "'");
    }
    slot = &r;
  }

  Report report;
  for (const auto& name : order) {
    const auto [base, dtd] = by_name.at(name);
    CellSummary cell;
    cell.label = name;
    if (base) cell.baseline = summarize_method(*base);
    if (dtd) cell.dtd = summarize_method(*dtd);
    if (base && dtd) {
      check_paired(*base, *dtd);
      cell.delta = cell.dtd->mean - cell.baseline->mean;
      for (std::size_t i = 0; i < base->seeds.size(); ++i) {
        const double b = base->seeds[i].mean_accuracy();
        const double d = dtd->seeds[i].mean_accuracy();
        if (d > b) ++cell.paired_wins;
        if (d < b) ++cell.paired_losses;
      }
      ++report.paired_cells;
      if (cell.dtd->mean > cell.baseline->mean) {
        ++report.wins;
      } else if (cell.dtd->mean < cell.baseline->mean) {
        ++report.losses;
      } else {
        ++report.ties;
      }
    }
    report.cells.push_back(std::move(cell));
  }
  return report;
}

std::string Report::to_json() const {
  using nlohmann::ordered_json;
  ordered_json j;
  ordered_json cells_json = ordered_json::array();
  for (const auto& c : cells) {
    ordered_json jc;
    jc["label"] = c.label;
    auto method = [](const std::optional<MethodSummary>& m) -> ordered_json {
      if (!m) return nullptr;
      return {{"mean_pct", m->mean}, {"std_pct", m->stddev}, {"seeds", m->seeds}};
    };
    jc["baseline"] = method(c.baseline);
    jc["dtd"] = method(c.dtd);
    jc["delta_pct"] = c.delta ? ordered_json(*c.delta) : ordered_json(nullptr);
    jc["paired_wins"] = c.paired_wins;
    jc["paired_losses"] = c.paired_losses;
    cells_json.push_back(std::move(jc));
  }
  j["cells"] = std::move(cells_json);
  j["paired_cells"] = paired_cells;
  j["wins"] = wins;
  j["losses"] = losses;
  j["ties"] = ties;
  j["win_rate"] = win_rate();
  j["non_loss_rate"] = non_loss_rate();
  return j.dump(2) + "\n";
}

std::string Report::to_table() const {
  std::size_t width = 10;
  for (const auto& c : cells) width = std::max(width, c.label.size());
  auto pad = [](std::string s, std::size_t w) {
    if (s.size() < w) s.append(w - s.size(), ' ');
    return s;
  };
  auto cell_text = [](const std::optional<MethodSummary>& m) {
    if (!m) return std::string("-");
    return fmt("%.2f", m->mean) + " +- " + fmt("%.2f", m->stddev);
  };
  std::string out = pad("experiment", width) + "  " + pad("baseline", 16) + "  " +
                    pad("dtd", 16) + "  delta   paired W/L\n";
  for (const auto& c : cells) {
    out += pad(c.label, width) + "  " + pad(cell_text(c.baseline), 16) + "  " +
           pad(cell_text(c.dtd), 16) + "  ";
    out += pad(c.delta ? fmt("%+.2f", *c.delta) : std::string("-"), 6) + "  ";
    out += c.delta ? std::to_string(c.paired_wins) + "/" + std::to_string(c.paired_losses)
                   : std::string("-");
    out += '\n';
  }
  out += "cells " + std::to_string(paired_cells) + ": wins " + std::to_string(wins) +
         ", losses " + std::to_string(losses) + ", ties " + std::to_string(ties) +
         ", win rate " + fmt("%.3f", win_rate()) + ", non-loss rate " +
         fmt("%.3f", non_loss_rate()) + "\n";
  return out;
}

}  // namespace dtdrift
