#include "infoflow/typology.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <set>
#include <sstream>

#include "default_rules.hpp"
#include "infoflow/error.hpp"
#include "infoflow/io.hpp"

namespace infoflow {

namespace {

constexpr auto kFlags = std::regex::ECMAScript | std::regex::icase | std::regex::optimize;

std::regex compile(const std::string& pattern) {
  try {
    return std::regex(pattern, kFlags);
  } catch (const std::regex_error& e) {
    throw Error(ErrorCode::ConfigError, "bad pattern '" + pattern + "': " + e.what());
  }
}

std::string escape_regex(std::string_view s) {
  static const std::string special = R"(\^$.|?*+()[]{}/)";
  std::string out;
  for (char c : s) {
    if (special.find(c) != std::string::npos) out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

constexpr Category kPriority[] = {Category::MilitaryGeopolitics, Category::Regulatory,
                                  Category::Corporate};

}  // namespace

RuleSet RuleSet::defaults() {
  static const RuleSet rules = from_json(nlohmann::json::parse(detail::kDefaultRulesJson));
  return rules;
}

RuleSet RuleSet::load(const std::filesystem::path& path) {
  try {
    return from_json(nlohmann::json::parse(read_text(path)));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
}

RuleSet RuleSet::from_json(const nlohmann::json& j) {
  RuleSet r;
  r.version_ = j.value("version", std::string("unversioned"));
  for (const auto& p : j.at("deadline_patterns")) r.deadline_patterns_.push_back(p.get<std::string>());
  for (const auto& p : j.at("event_patterns")) {
    if (p.is_string()) {
      r.event_patterns_.push_back({p.get<std::string>(), false});
    } else {
      r.event_patterns_.push_back(
          {p.at("pattern").get<std::string>(), p.value("overrides_deadline", false)});
    }
  }
  for (const auto& [name, words] : j.at("category_keywords").items()) {
    auto& list = r.category_keywords_[parse_category(name)];
    for (const auto& w : words) list.push_back(w.get<std::string>());
  }

  if (r.deadline_patterns_.empty() || r.event_patterns_.empty()) {
    throw Error(ErrorCode::ConfigError, "rule set needs non-empty deadline and event pattern lists");
  }
  std::set<std::string> seen(r.deadline_patterns_.begin(), r.deadline_patterns_.end());
  for (const auto& e : r.event_patterns_) {
    if (seen.count(e.pattern)) {
      throw Error(ErrorCode::ConfigError, "pattern '" + e.pattern + "' is both deadline and event");
    }
  }

  for (const auto& p : r.deadline_patterns_) r.deadline_re_.push_back(compile(p));
  for (const auto& e : r.event_patterns_) r.event_re_.push_back(compile(e.pattern));
  for (const auto& [cat, words] : r.category_keywords_) {
    auto& res = r.keyword_re_[cat];
    for (const auto& w : words) {
      res.push_back(compile("(^|[^a-z0-9&])" + escape_regex(normalize_text(w)) + "($|[^a-z0-9&])"));
    }
  }
  return r;
}

bool RuleSet::matches_deadline(const std::string& normalized) const {
  return std::any_of(deadline_re_.begin(), deadline_re_.end(),
                     [&](const std::regex& re) { return std::regex_search(normalized, re); });
}

int RuleSet::event_match_strength(const std::string& normalized) const {
  int strength = 0;
  for (std::size_t i = 0; i < event_re_.size(); ++i) {
    if (std::regex_search(normalized, event_re_[i])) {
      strength = std::max(strength, event_patterns_[i].overrides_deadline ? 2 : 1);
    }
  }
  return strength;
}

std::size_t RuleSet::keyword_votes(Category c, const std::string& normalized) const {
  auto it = keyword_re_.find(c);
  if (it == keyword_re_.end()) return 0;
  return static_cast<std::size_t>(
      std::count_if(it->second.begin(), it->second.end(),
                    [&](const std::regex& re) { return std::regex_search(normalized, re); }));
}

std::string normalize_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
      continue;
    }
    if (space) out.push_back(' ');
    space = false;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

ResolutionType classify_resolution(std::string_view question, std::string_view resolution_criteria,
                                   const RuleSet& rules) {
  std::string text = normalize_text(question);
  if (!resolution_criteria.empty()) text += " " + normalize_text(resolution_criteria);
  const int event = rules.event_match_strength(text);
  if (event == 2) return ResolutionType::EventResolved;
  if (rules.matches_deadline(text)) return ResolutionType::DeadlineResolved;
  if (event == 1) return ResolutionType::EventResolved;
  return ResolutionType::Unclassifiable;
}

Category classify_category(std::string_view question, const RuleSet& rules) {
  const std::string text = normalize_text(question);
  Category best = Category::Other;
  std::size_t best_votes = 0;
  for (Category c : kPriority) {
    const auto votes = rules.keyword_votes(c, text);
    if (votes > best_votes) {
      best = c;
      best_votes = votes;
    }
  }
  return best;
}

TypologyReport typology_report(std::span<const MarketRecord> markets) {
  TypologyReport report;
  report.rows = {{ResolutionType::EventResolved},
                 {ResolutionType::DeadlineResolved},
                 {ResolutionType::Unclassifiable}};
  for (const auto& m : markets) {
    auto& row = report.rows[static_cast<std::size_t>(m.resolution_type)];
    ++row.n;
    if (m.outcome == Outcome::Yes) {
      ++row.yes;
      if (m.resolution_type == ResolutionType::DeadlineResolved) {
        report.review_deadline_yes.push_back(m.market_id);
      }
    }
  }
  report.total = markets.size();
  for (auto& row : report.rows) {
    row.share = report.total ? static_cast<double>(row.n) / static_cast<double>(report.total) : 0.0;
    row.yes_rate = row.n ? static_cast<double>(row.yes) / static_cast<double>(row.n) : 0.0;
  }
  return report;
}

nlohmann::json to_json(const TypologyReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"resolution_type", to_string(r.type)},
                    {"n", r.n},
                    {"share", r.share},
                    {"yes", r.yes},
                    {"yes_rate", r.yes_rate}});
  }
  return {{"schema_version", kSchemaVersion},
          {"total", report.total},
          {"rows", rows},
          {"review_deadline_yes", report.review_deadline_yes}};
}

std::string format_table(const TypologyReport& report) {
  std::ostringstream out;
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-20s %8s %8s %9s\n", "type", "N", "share", "YES rate");
  out << buf;
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%-20s %8zu %7.1f%% %8.1f%%\n",
                  std::string(to_string(r.type)).c_str(), r.n, 100.0 * r.share, 100.0 * r.yes_rate);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "%-20s %8zu\n", "total", report.total);
  out << buf;
  if (!report.review_deadline_yes.empty()) {
    out << "review: " << report.review_deadline_yes.size()
        << " deadline-resolved market(s) resolved YES\n";
  }
  return out.str();
}

bool surprise_resolved(const PriceSeries& series, Outcome outcome, double consensus_band) {
  if (series.empty()) return false;
  const auto pts = series.points();
  if (outcome == Outcome::No) {
    return std::all_of(pts.begin(), pts.end(),
                       [&](const PricePoint& p) { return p.vwap >= 1.0 - consensus_band; });
  }
  return std::all_of(pts.begin(), pts.end(),
                     [&](const PricePoint& p) { return p.vwap <= consensus_band; });
}

}  // namespace infoflow
