#include "pdm/rollcall.hpp"

#include "pdm/csv.hpp"
#include "pdm/error.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace pdm {

namespace {

std::optional<long> parse_integer(const std::string& text) {
  std::string_view s(text);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  long value = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || end != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

// Accepts integral spellings such as "1.0" that some exports use for codes.
std::optional<long> parse_code(const std::string& text) {
  if (auto v = parse_integer(text)) return v;
  double d = 0;
  std::string_view s(text);
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), d);
  if (ec != std::errc{} || end != s.data() + s.size()) return std::nullopt;
  if (d != static_cast<double>(static_cast<long>(d))) return std::nullopt;
  return static_cast<long>(d);
}

std::size_t require_column(const std::vector<std::string>& header, const std::string& name,
                           const std::filesystem::path& path) {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    throw ParseError(path.string() + ": missing column '" + name + "'", 1, 0);
  }
  return static_cast<std::size_t>(it - header.begin());
}

std::optional<std::size_t> find_column(const std::vector<std::string>& header,
                                       const std::string& name) {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) return std::nullopt;
  return static_cast<std::size_t>(it - header.begin());
}

} // namespace

VoteMatrix::VoteMatrix(std::vector<Legislator> legislators, std::vector<std::string> vote_ids,
                       VoteValues values)
    : legislators_(std::move(legislators)), vote_ids_(std::move(vote_ids)),
      values_(std::move(values)) {
  if (static_cast<Eigen::Index>(legislators_.size()) != values_.rows() ||
      static_cast<Eigen::Index>(vote_ids_.size()) != values_.cols()) {
    throw Error("data", "vote matrix shape does not match legislator / vote lists");
  }
  if (values_.cols() < 1) throw Error("data", "no votes");
  if (values_.rows() < 2) throw Error("data", "need at least two legislators");
  for (Eigen::Index j = 0; j < values_.cols(); ++j) {
    for (Eigen::Index i = 0; i < values_.rows(); ++i) {
      const int x = values_(i, j);
      if (x < -1 || x > 1) {
        throw Error("data", "vote value " + std::to_string(x) + " at legislator " +
                                std::to_string(i) + ", vote " + std::to_string(j) +
                                " is not in {-1,0,1}");
      }
    }
  }
  std::unordered_set<std::string> seen;
  for (const auto& leg : legislators_) {
    if (!seen.insert(leg.id).second) throw Error("data", "duplicate legislator id '" + leg.id + "'");
  }
}

int VoteMatrix::yeas(Eigen::Index j) const {
  return static_cast<int>((values_.col(j).array() == 1).count());
}

int VoteMatrix::nays(Eigen::Index j) const {
  return static_cast<int>((values_.col(j).array() == -1).count());
}

VoteMatrix load_wide_csv(const std::filesystem::path& path) {
  const auto lines = csv::read_lines(path);
  if (lines.empty()) throw ParseError(path.string() + ": empty file", 1, 0);

  const auto header = csv::split_record(lines.front().text);
  static const std::vector<std::string> kFixed = {"id", "name", "party", "region"};
  if (header.size() < kFixed.size() ||
      !std::equal(kFixed.begin(), kFixed.end(), header.begin())) {
    throw ParseError(path.string() + ": header must start with id,name,party,region",
                     lines.front().number, 1);
  }
  if (header.size() == kFixed.size()) throw ParseError(path.string() + ": no votes", 1, 5);

  std::vector<std::string> vote_ids(header.begin() + 4, header.end());
  const auto m = static_cast<Eigen::Index>(vote_ids.size());
  const auto n = static_cast<Eigen::Index>(lines.size() - 1);

  std::vector<Legislator> legislators;
  legislators.reserve(static_cast<std::size_t>(n));
  VoteValues values(n, m);
  std::unordered_set<std::string> ids;

  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& line = lines[static_cast<std::size_t>(i) + 1];
    auto fields = csv::split_record(line.text);
    if (fields.size() != header.size()) {
      throw ParseError(path.string() + ": row " + std::to_string(line.number) + " has " +
                           std::to_string(fields.size()) + " fields, expected " +
                           std::to_string(header.size()),
                       line.number, 0);
    }
    Legislator leg{fields[0], fields[1], fields[2],
                   fields[3].empty() ? std::nullopt : std::optional<std::string>(fields[3])};
    if (!ids.insert(leg.id).second) {
      throw ParseError(path.string() + ": duplicate id '" + leg.id + "' at row " +
                           std::to_string(line.number),
                       line.number, 1);
    }
    for (Eigen::Index j = 0; j < m; ++j) {
      const auto& cell = fields[static_cast<std::size_t>(j) + 4];
      auto value = parse_integer(cell);
      if (!value || *value < -1 || *value > 1) {
        throw ParseError(path.string() + ": invalid vote value '" + cell + "' at row " +
                             std::to_string(line.number) + ", column " +
                             std::to_string(j + 5) + " (" + vote_ids[static_cast<std::size_t>(j)] +
                             ")",
                         line.number, j + 5);
      }
      values(i, j) = static_cast<int>(*value);
    }
    legislators.push_back(std::move(leg));
  }
  return VoteMatrix(std::move(legislators), std::move(vote_ids), std::move(values));
}

std::string to_wide_csv(const VoteMatrix& v) {
  std::vector<std::string> header = {"id", "name", "party", "region"};
  header.insert(header.end(), v.vote_ids().begin(), v.vote_ids().end());
  std::string out = csv::join(header) + "\n";
  for (Eigen::Index i = 0; i < v.n(); ++i) {
    const auto& leg = v.legislators()[static_cast<std::size_t>(i)];
    std::vector<std::string> row = {leg.id, leg.name, leg.party, leg.region.value_or("")};
    for (Eigen::Index j = 0; j < v.m(); ++j) row.push_back(std::to_string(v(i, j)));
    out += csv::join(row) + "\n";
  }
  return out;
}

void save_wide_csv(const VoteMatrix& v, const std::filesystem::path& path) {
  csv::write_text(path, to_wide_csv(v));
}

int map_cast_code(int cast_code) noexcept {
  if (cast_code >= 1 && cast_code <= 3) return 1;
  if (cast_code >= 4 && cast_code <= 6) return -1;
  return 0;
}

VoteMatrix load_voteview(const std::filesystem::path& members_path,
                         const std::filesystem::path& votes_path) {
  const auto member_lines = csv::read_lines(members_path);
  if (member_lines.empty()) throw ParseError(members_path.string() + ": empty file", 1, 0);
  const auto mheader = csv::split_record(member_lines.front().text);
  const auto id_col = require_column(mheader, "icpsr", members_path);
  const auto name_col = find_column(mheader, "bioname");
  const auto party_col = find_column(mheader, "party_code");
  const auto region_col = find_column(mheader, "state_abbrev");

  std::vector<Legislator> legislators;
  std::unordered_map<std::string, Eigen::Index> row_of;
  for (std::size_t k = 1; k < member_lines.size(); ++k) {
    const auto& line = member_lines[k];
    auto f = csv::split_record(line.text);
    if (f.size() != mheader.size()) {
      throw ParseError(members_path.string() + ": row " + std::to_string(line.number) +
                           " is ragged",
                       line.number, 0);
    }
    Legislator leg;
    leg.id = f[id_col];
    leg.name = name_col ? f[*name_col] : leg.id;
    leg.party = party_col ? f[*party_col] : "";
    if (region_col && !f[*region_col].empty()) leg.region = f[*region_col];
    if (!row_of.emplace(leg.id, static_cast<Eigen::Index>(legislators.size())).second) {
      throw ParseError(members_path.string() + ": duplicate legislator id '" + leg.id +
                           "' at row " + std::to_string(line.number),
                       line.number, static_cast<long>(id_col) + 1);
    }
    legislators.push_back(std::move(leg));
  }

  const auto vote_lines = csv::read_lines(votes_path);
  if (vote_lines.empty()) throw ParseError(votes_path.string() + ": empty file", 1, 0);
  const auto vheader = csv::split_record(vote_lines.front().text);
  const auto vid_col = require_column(vheader, "icpsr", votes_path);
  const auto roll_col = require_column(vheader, "rollnumber", votes_path);
  const auto cast_col = require_column(vheader, "cast_code", votes_path);

  struct Cast {
    Eigen::Index row;
    long roll;
    int value;
  };
  std::vector<Cast> casts;
  std::set<std::pair<Eigen::Index, long>> seen;
  std::set<long> rolls;
  for (std::size_t k = 1; k < vote_lines.size(); ++k) {
    const auto& line = vote_lines[k];
    auto f = csv::split_record(line.text);
    if (f.size() != vheader.size()) {
      throw ParseError(votes_path.string() + ": row " + std::to_string(line.number) +
                           " is ragged",
                       line.number, 0);
    }
    auto it = row_of.find(f[vid_col]);
    if (it == row_of.end()) {
      throw ParseError(votes_path.string() + ": row " + std::to_string(line.number) +
                           " references unknown legislator '" + f[vid_col] + "'",
                       line.number, static_cast<long>(vid_col) + 1);
    }
    auto roll = parse_code(f[roll_col]);
    auto code = parse_code(f[cast_col]);
    if (!roll) {
      throw ParseError(votes_path.string() + ": bad rollnumber at row " +
                           std::to_string(line.number),
                       line.number, static_cast<long>(roll_col) + 1);
    }
    if (!code) {
      throw ParseError(votes_path.string() + ": bad cast_code at row " +
                           std::to_string(line.number),
                       line.number, static_cast<long>(cast_col) + 1);
    }
    if (!seen.emplace(it->second, *roll).second) {
      throw ParseError(votes_path.string() + ": duplicate vote for legislator '" + f[vid_col] +
                           "' on roll " + std::to_string(*roll) + " at row " +
                           std::to_string(line.number),
                       line.number, 0);
    }
    rolls.insert(*roll);
    casts.push_back({it->second, *roll, map_cast_code(static_cast<int>(*code))});
  }
  if (rolls.empty()) throw Error("data", "no votes");

  std::map<long, Eigen::Index> col_of;
  std::vector<std::string> vote_ids;
  for (long r : rolls) {
    col_of.emplace(r, static_cast<Eigen::Index>(vote_ids.size()));
    vote_ids.push_back(std::to_string(r));
  }
  VoteValues values = VoteValues::Zero(static_cast<Eigen::Index>(legislators.size()),
                                       static_cast<Eigen::Index>(vote_ids.size()));
  for (const auto& c : casts) values(c.row, col_of.at(c.roll)) = c.value;
  return VoteMatrix(std::move(legislators), std::move(vote_ids), std::move(values));
}

VoteMatrix filter_minority(const VoteMatrix& v, double threshold) {
  if (!(threshold >= 0.0 && threshold < 0.5)) {
    throw Error("parameter", "minority threshold must lie in [0, 0.5)");
  }
  // Strict "less than": a tie with threshold * n survives. The relative slack
  // keeps products like 0.025 * 200 from rounding just above an integer.
  const double cutoff = threshold * static_cast<double>(v.n()) * (1.0 - 1e-12);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < v.m(); ++j) {
    const int minority = std::min(v.yeas(j), v.nays(j));
    if (!(static_cast<double>(minority) < cutoff)) keep.push_back(j);
  }
  if (keep.empty()) throw Error("data", "all votes filtered");

  VoteValues values(v.n(), static_cast<Eigen::Index>(keep.size()));
  std::vector<std::string> ids;
  ids.reserve(keep.size());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    values.col(static_cast<Eigen::Index>(k)) = v.values().col(keep[k]);
    ids.push_back(v.vote_ids()[static_cast<std::size_t>(keep[k])]);
  }
  return VoteMatrix(v.legislators(), std::move(ids), std::move(values));
}

} // namespace pdm
