// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "divrec/corpus.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "csv.h"

namespace divrec {
namespace {

std::ifstream OpenInput(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

std::ofstream OpenOutput(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

// "Toy Story (1995)" -> 1995. Trailing whitespace is ignored.
std::optional<int> YearFromTitle(std::string_view title) {
  while (!title.empty() && title.back() == ' ') title.remove_suffix(1);
  if (title.size() < 6 || title.back() != ')') return std::nullopt;
  std::string_view digits = title.substr(title.size() - 5, 4);
  if (title[title.size() - 6] != '(') return std::nullopt;
  int year = 0;
  for (char c : digits) {
    if (c < '0' || c > '9') return std::nullopt;
    year = year * 10 + (c - '0');
  }
  return year;
}

}  // namespace

bool OnHalfStarGrid(double rating) {
  if (!std::isfinite(rating) || rating < kMinRating || rating > kMaxRating) {
    return false;
  }
  const double doubled = rating * 2.0;
  return doubled == std::floor(doubled);
}

GenomeTable::GenomeTable(std::vector<TagLabel> tags,
                         std::vector<int> external_tag_ids)
    : tags_(std::move(tags)),
      external_tag_ids_(std::move(external_tag_ids)),
      relevance_(0, tags_.size()) {
  if (external_tag_ids_.size() != tags_.size()) {
    throw std::invalid_argument("tag id list does not match tag labels");
  }
}

std::span<const double> GenomeTable::Vector(MovieId movie) const {
  auto it = row_of_.find(movie);
  if (it == row_of_.end()) {
    throw std::out_of_range("no genome vector for movie " + std::to_string(movie));
  }
  return relevance_.row(it->second);
}

void GenomeTable::Add(MovieId movie, std::span<const double> relevance) {
  if (relevance.size() != dim()) {
    throw DataError("genome dimension mismatch: got " +
                    std::to_string(relevance.size()) + ", expected " +
                    std::to_string(dim()));
  }
  for (double v : relevance) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw DataError("relevance outside [0,1] for movie " + std::to_string(movie));
    }
  }
  if (row_of_.count(movie)) {
    throw DataError("duplicate genome vector for movie " + std::to_string(movie));
  }
  row_of_.emplace(movie, movie_ids_.size());
  movie_ids_.push_back(movie);
  relevance_.AppendRow(relevance);
}

std::vector<RatingEvent> LatestRatings(std::span<const RatingEvent> events) {
  // Later position wins among equal timestamps: scan in order and replace on >=.
  std::map<std::pair<UserId, MovieId>, std::size_t> chosen;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto key = std::make_pair(events[i].user_id, events[i].movie_id);
    auto [it, inserted] = chosen.emplace(key, i);
    if (!inserted && events[i].timestamp >= events[it->second].timestamp) {
      it->second = i;
    }
  }
  std::vector<RatingEvent> out;
  out.reserve(chosen.size());
  for (const auto& [key, index] : chosen) out.push_back(events[index]);
  return out;
}

std::vector<RatingEvent> LoadRatings(const std::filesystem::path& path) {
  auto in = OpenInput(path);
  csv::ExpectHeader(in, "userId,movieId,rating,timestamp", path.string());
  std::vector<RatingEvent> events;
  std::string line;
  long line_no = 1;
  while (csv::ReadLine(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = csv::SplitRecord(line);
    if (fields.size() != 4) {
      throw DataError("malformed row: expected 4 fields, got " +
                          std::to_string(fields.size()),
                      line_no);
    }
    RatingEvent e;
    e.user_id = csv::ParseInt(fields[0], line_no);
    e.movie_id = csv::ParseInt(fields[1], line_no);
    e.rating = csv::ParseDouble(fields[2], line_no);
    e.timestamp = csv::ParseInt(fields[3], line_no);
    if (!OnHalfStarGrid(e.rating)) {
      throw DataError("rating off half-star grid: " + fields[2], line_no);
    }
    events.push_back(e);
  }
  return LatestRatings(events);
}

std::vector<Movie> LoadMovies(const std::filesystem::path& path) {
  auto in = OpenInput(path);
  csv::ExpectHeader(in, "movieId,title,genres", path.string());
  std::vector<Movie> movies;
  std::unordered_set<MovieId> seen;
  std::string line;
  long line_no = 1;
  while (csv::ReadLine(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = csv::SplitRecord(line);
    if (fields.size() != 3) {
      throw DataError("malformed row: expected 3 fields, got " +
                          std::to_string(fields.size()),
                      line_no);
    }
    Movie m;
    m.movie_id = csv::ParseInt(fields[0], line_no);
    m.title = std::move(fields[1]);
    m.genres = std::move(fields[2]);
    m.year = YearFromTitle(m.title);
    if (!seen.insert(m.movie_id).second) {
      throw DataError("duplicate movieId " + std::to_string(m.movie_id), line_no);
    }
    movies.push_back(std::move(m));
  }
  return movies;
}

GenomeLoadResult LoadGenome(const std::filesystem::path& scores_path,
                            const std::filesystem::path& tags_path,
                            std::size_t expected_dim) {
  std::vector<TagLabel> tags;
  std::vector<int> external_ids;
  std::unordered_map<long long, int> index_of_tag;
  {
    auto in = OpenInput(tags_path);
    csv::ExpectHeader(in, "tagId,tag", tags_path.string());
    std::string line;
    long line_no = 1;
    while (csv::ReadLine(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      auto fields = csv::SplitRecord(line);
      if (fields.size() != 2) throw DataError("malformed tag row", line_no);
      const long long external = csv::ParseInt(fields[0], line_no);
      const int index = static_cast<int>(tags.size());
      if (!index_of_tag.emplace(external, index).second) {
        throw DataError("duplicate tagId " + fields[0], line_no);
      }
      tags.push_back({index, std::move(fields[1])});
      external_ids.push_back(static_cast<int>(external));
    }
  }
  if (tags.size() != expected_dim) {
    throw DataError("genome dimension mismatch: " + std::to_string(tags.size()) +
                    " tags, expected " + std::to_string(expected_dim));
  }

  // Accumulate per movie in first-appearance order.
  std::vector<MovieId> order;
  std::unordered_map<MovieId, std::pair<std::vector<double>, std::size_t>> rows;
  {
    auto in = OpenInput(scores_path);
    csv::ExpectHeader(in, "movieId,tagId,relevance", scores_path.string());
    std::string line;
    long line_no = 1;
    while (csv::ReadLine(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto fields = csv::SplitRecord(line);
      if (fields.size() != 3) throw DataError("malformed genome row", line_no);
      const MovieId movie = csv::ParseInt(fields[0], line_no);
      const long long tag = csv::ParseInt(fields[1], line_no);
      const double relevance = csv::ParseDouble(fields[2], line_no);
      if (!std::isfinite(relevance) || relevance < 0.0 || relevance > 1.0) {
        throw DataError("relevance outside [0,1]: " + fields[2], line_no);
      }
      auto tag_it = index_of_tag.find(tag);
      if (tag_it == index_of_tag.end()) {
        throw DataError("unknown tagId " + fields[1], line_no);
      }
      auto [it, inserted] = rows.try_emplace(movie);
      if (inserted) {
        order.push_back(movie);
        it->second.first.assign(expected_dim, -1.0);
      }
      double& slot = it->second.first[tag_it->second];
      if (slot < 0.0) ++it->second.second;
      slot = relevance;
    }
  }

  GenomeLoadResult result{GenomeTable(std::move(tags), std::move(external_ids)), {}};
  for (MovieId movie : order) {
    auto& [values, filled] = rows[movie];
    if (filled < expected_dim) {
      result.warnings.push_back("movie " + std::to_string(movie) + ": " +
                                std::to_string(expected_dim - filled) +
                                " missing genome entries filled with 0.0");
      for (double& v : values) {
        if (v < 0.0) v = 0.0;
      }
    }
    result.genome.Add(movie, values);
  }
  return result;
}

Corpus::Corpus(std::vector<Movie> movies, std::vector<RatingEvent> ratings,
               GenomeTable genome)
    : movies_(std::move(movies)),
      ratings_(LatestRatings(ratings)),
      genome_(std::move(genome)) {
  for (std::size_t i = 0; i < movies_.size(); ++i) {
    if (!movie_index_.emplace(movies_[i].movie_id, i).second) {
      throw DataError("duplicate movieId " + std::to_string(movies_[i].movie_id));
    }
  }
  Validate();
}

void Corpus::Validate() const {
  for (const auto& r : ratings_) {
    if (!movie_index_.count(r.movie_id)) {
      throw DataError("rating references unknown movie " + std::to_string(r.movie_id));
    }
    if (!OnHalfStarGrid(r.rating)) {
      throw DataError("rating off half-star grid for movie " +
                      std::to_string(r.movie_id));
    }
  }
  for (MovieId id : genome_.movie_ids()) {
    if (!movie_index_.count(id)) {
      throw DataError("genome references unknown movie " + std::to_string(id));
    }
  }
}

const Movie* Corpus::FindMovie(MovieId id) const {
  auto it = movie_index_.find(id);
  return it == movie_index_.end() ? nullptr : &movies_[it->second];
}

Corpus Corpus::LoadDirectory(const std::filesystem::path& dir,
                             std::size_t genome_dim,
                             std::vector<std::string>* warnings) {
  auto movies = LoadMovies(dir / "movies.csv");
  auto ratings = LoadRatings(dir / "ratings.csv");
  auto genome = LoadGenome(dir / "genome-scores.csv", dir / "genome-tags.csv",
                           genome_dim);
  if (warnings) {
    warnings->insert(warnings->end(), genome.warnings.begin(),
                     genome.warnings.end());
  }
  return Corpus(std::move(movies), std::move(ratings), std::move(genome.genome));
}

void Corpus::WriteDirectory(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  {
    auto out = OpenOutput(dir / "movies.csv");
    out << "movieId,title,genres\n";
    for (const auto& m : movies_) {
      out << m.movie_id << ',' << csv::Escape(m.title) << ',' << csv::Escape(m.genres)
          << '\n';
    }
  }
  {
    auto out = OpenOutput(dir / "ratings.csv");
    out << "userId,movieId,rating,timestamp\n";
    char buf[16];
    for (const auto& r : ratings_) {
      std::snprintf(buf, sizeof(buf), "%.1f", r.rating);
      out << r.user_id << ',' << r.movie_id << ',' << buf << ',' << r.timestamp << '\n';
    }
  }
  {
    auto out = OpenOutput(dir / "genome-tags.csv");
    out << "tagId,tag\n";
    for (std::size_t t = 0; t < genome_.dim(); ++t) {
      out << genome_.external_tag_ids()[t] << ',' << csv::Escape(genome_.tags()[t].name)
          << '\n';
    }
  }
  {
    auto out = OpenOutput(dir / "genome-scores.csv");
    out << "movieId,tagId,relevance\n";
    for (std::size_t row = 0; row < genome_.size(); ++row) {
      const auto values = genome_.matrix().row(row);
      for (std::size_t t = 0; t < values.size(); ++t) {
        out << genome_.movie_ids()[row] << ',' << genome_.external_tag_ids()[t] << ','
            << csv::FormatDouble(values[t]) << '\n';
      }
    }
  }
}

CorpusSummary Summarize(const Corpus& corpus) {
  CorpusSummary s;
  s.movies = corpus.movies().size();
  s.ratings = corpus.ratings().size();
  s.movies_with_genome = corpus.genome().size();
  std::map<UserId, std::size_t> per_user;
  for (const auto& r : corpus.ratings()) ++per_user[r.user_id];
  s.users = per_user.size();
  for (const auto& [user, count] : per_user) {
    const int bucket = std::bit_width(count) - 1;
    ++s.activity_histogram[bucket];
  }
  return s;
}

std::string FormatSummary(const CorpusSummary& s) {
  std::ostringstream os;
  os << "users " << s.users << "\nmovies " << s.movies << "\nratings " << s.ratings
     << "\nmovies_with_genome " << s.movies_with_genome << "\n";
  os << "ratings_per_user_histogram\n";
  for (const auto& [bucket, users] : s.activity_histogram) {
    os << "  [" << (std::size_t{1} << bucket) << ", " << (std::size_t{1} << (bucket + 1))
       << ") " << users << "\n";
  }
  return os.str();
}

}  // namespace divrec
