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

#ifndef DIVREC_CORPUS_H_
#define DIVREC_CORPUS_H_

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "divrec/types.h"

namespace divrec {

struct Movie {
  MovieId movie_id = 0;
  std::string title;
  std::string genres;
  std::optional<int> year;

  bool operator==(const Movie&) const = default;
};

struct RatingEvent {
  UserId user_id = 0;
  MovieId movie_id = 0;
  double rating = 0.0;
  Timestamp timestamp = 0;

  bool operator==(const RatingEvent&) const = default;
};

struct TagLabel {
  int tag_id = 0;  // dense index in [0, dim)
  std::string name;

  bool operator==(const TagLabel&) const = default;
};

// True when `rating` is one of 0.5, 1.0, ..., 5.0.
bool OnHalfStarGrid(double rating);

// Dense tag-relevance vectors, one row per movie, in tag-file column order.
class GenomeTable {
 public:
  GenomeTable() = default;
  GenomeTable(std::vector<TagLabel> tags, std::vector<int> external_tag_ids);

  std::size_t dim() const { return tags_.size(); }
  std::size_t size() const { return movie_ids_.size(); }
  const std::vector<TagLabel>& tags() const { return tags_; }
  const std::vector<int>& external_tag_ids() const { return external_tag_ids_; }
  const std::vector<MovieId>& movie_ids() const { return movie_ids_; }
  const DenseMatrix& matrix() const { return relevance_; }

  bool Contains(MovieId movie) const { return row_of_.count(movie) > 0; }
  // Throws std::out_of_range for movies without a vector.
  std::span<const double> Vector(MovieId movie) const;
  std::size_t RowOf(MovieId movie) const { return row_of_.at(movie); }

  // Adds a movie; `relevance` must have dim() entries in [0,1].
  void Add(MovieId movie, std::span<const double> relevance);

  bool operator==(const GenomeTable& other) const {
    return tags_ == other.tags_ && external_tag_ids_ == other.external_tag_ids_ &&
           movie_ids_ == other.movie_ids_ && relevance_ == other.relevance_;
  }

 private:
  std::vector<TagLabel> tags_;
  std::vector<int> external_tag_ids_;
  std::vector<MovieId> movie_ids_;
  std::unordered_map<MovieId, std::size_t> row_of_;
  DenseMatrix relevance_;
};

struct GenomeLoadResult {
  GenomeTable genome;
  std::vector<std::string> warnings;
};

// Parses `userId,movieId,rating,timestamp`. Duplicate (user, movie) pairs
// keep the latest timestamp; equal timestamps keep the later row. The result
// is sorted by (user_id, movie_id).
std::vector<RatingEvent> LoadRatings(const std::filesystem::path& path);

// Latest-wins reduction over an arbitrary event list, same rules as
// LoadRatings with list position standing in for file row.
std::vector<RatingEvent> LatestRatings(std::span<const RatingEvent> events);

std::vector<Movie> LoadMovies(const std::filesystem::path& path);

// Loads genome-scores and genome-tags. The tag file must list exactly
// `expected_dim` tags. Movies with missing tag rows are zero-filled and a
// warning is recorded per movie.
GenomeLoadResult LoadGenome(const std::filesystem::path& scores_path,
                            const std::filesystem::path& tags_path,
                            std::size_t expected_dim = kGenomeDim);

class Corpus {
 public:
  Corpus() = default;
  Corpus(std::vector<Movie> movies, std::vector<RatingEvent> ratings,
         GenomeTable genome);

  // Reads ratings.csv, movies.csv, genome-scores.csv and genome-tags.csv.
  static Corpus LoadDirectory(const std::filesystem::path& dir,
                              std::size_t genome_dim = kGenomeDim,
                              std::vector<std::string>* warnings = nullptr);
  void WriteDirectory(const std::filesystem::path& dir) const;

  const std::vector<Movie>& movies() const { return movies_; }
  // Latest-wins training view sorted by (user_id, movie_id).
  const std::vector<RatingEvent>& ratings() const { return ratings_; }
  const GenomeTable& genome() const { return genome_; }

  const Movie* FindMovie(MovieId id) const;

  bool operator==(const Corpus& other) const {
    return movies_ == other.movies_ && ratings_ == other.ratings_ &&
           genome_ == other.genome_;
  }

 private:
  void Validate() const;

  std::vector<Movie> movies_;
  std::vector<RatingEvent> ratings_;
  GenomeTable genome_;
  std::unordered_map<MovieId, std::size_t> movie_index_;
};

struct CorpusSummary {
  std::size_t users = 0;
  std::size_t movies = 0;
  std::size_t ratings = 0;
  std::size_t movies_with_genome = 0;
  // Users bucketed by rating count: key b holds users with [2^b, 2^(b+1)).
  std::map<int, std::size_t> activity_histogram;

  bool operator==(const CorpusSummary&) const = default;
};

CorpusSummary Summarize(const Corpus& corpus);
std::string FormatSummary(const CorpusSummary& summary);

}  // namespace divrec

#endif  // DIVREC_CORPUS_H_
