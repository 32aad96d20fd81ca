#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace pdm {

using VoteValues = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

struct Legislator {
  std::string id;
  std::string name;
  std::string party;
  std::optional<std::string> region;

  bool operator==(const Legislator&) const = default;
};

/// Roll call matrix: one row per legislator, one column per vote, entries
/// +1 (yea), -1 (nay) or 0 (absent, present, not voting).
///
/// The constructor validates the alphabet, the shape, id uniqueness and
/// n >= 2, m >= 1; a VoteMatrix that exists is always valid.
class VoteMatrix {
public:
  VoteMatrix(std::vector<Legislator> legislators, std::vector<std::string> vote_ids,
             VoteValues values);

  Eigen::Index n() const noexcept { return values_.rows(); }
  Eigen::Index m() const noexcept { return values_.cols(); }

  const std::vector<Legislator>& legislators() const noexcept { return legislators_; }
  const std::vector<std::string>& vote_ids() const noexcept { return vote_ids_; }
  const VoteValues& values() const noexcept { return values_; }

  int operator()(Eigen::Index i, Eigen::Index j) const { return values_(i, j); }

  Eigen::MatrixXd as_real() const { return values_.cast<double>(); }

  // Number of +1 / -1 entries in column j.
  int yeas(Eigen::Index j) const;
  int nays(Eigen::Index j) const;

  bool operator==(const VoteMatrix&) const = default;

private:
  std::vector<Legislator> legislators_;
  std::vector<std::string> vote_ids_;
  VoteValues values_;
};

/// Wide CSV: header `id,name,party,region,<vote ids...>`, one row per
/// legislator, vote cells in {1,0,-1}. An empty region cell means "none".
VoteMatrix load_wide_csv(const std::filesystem::path& path);
std::string to_wide_csv(const VoteMatrix& v);
void save_wide_csv(const VoteMatrix& v, const std::filesystem::path& path);

/// Voteview long format. The members file needs an `icpsr` column (name
/// `bioname`, party `party_code`, region `state_abbrev` are used when
/// present); the votes file needs `icpsr`, `rollnumber`, `cast_code`.
/// Cast codes 1-3 map to +1, 4-6 to -1, anything else (and a missing
/// pair) to 0. Columns are ordered by ascending roll number.
VoteMatrix load_voteview(const std::filesystem::path& members_path,
                         const std::filesystem::path& votes_path);

int map_cast_code(int cast_code) noexcept;

inline constexpr double kDefaultMinorityThreshold = 0.025;

/// Drops votes whose minority side (min of yeas, nays) is strictly below
/// threshold * n. Throws when nothing survives.
VoteMatrix filter_minority(const VoteMatrix& v, double threshold = kDefaultMinorityThreshold);

} // namespace pdm
