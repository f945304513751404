#pragma once

// 2-D lattice of cells, each holding a channel (frequency) id in [0, F).
// Two cells interfere when they are lattice neighbours and share a channel.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cxnet/error.hpp"

namespace cxnet {

using Channel = std::uint32_t;

enum class Neighborhood { von_neumann, moore };
enum class Boundary { toroidal, bounded };

inline std::string to_string(Neighborhood n) { return n == Neighborhood::moore ? "moore" : "von-neumann"; }
inline std::string to_string(Boundary b) { return b == Boundary::toroidal ? "toroidal" : "bounded"; }

inline Neighborhood parse_neighborhood(const std::string& s) {
  if (s == "moore") return Neighborhood::moore;
  if (s == "von-neumann" || s == "vonneumann" || s == "von_neumann") return Neighborhood::von_neumann;
  throw PreconditionError("unknown neighborhood '" + s + "' (expected moore or von-neumann)");
}

inline Boundary parse_boundary(const std::string& s) {
  if (s == "toroidal" || s == "torus") return Boundary::toroidal;
  if (s == "bounded") return Boundary::bounded;
  throw PreconditionError("unknown boundary '" + s + "' (expected toroidal or bounded)");
}

struct CellCoord {
  std::size_t x = 0;
  std::size_t y = 0;
  friend bool operator==(const CellCoord&, const CellCoord&) = default;
};

class ChannelLattice {
 public:
  ChannelLattice(std::size_t width, std::size_t height, Channel channels,
                 Neighborhood nb = Neighborhood::moore, Boundary boundary = Boundary::toroidal,
                 std::vector<Channel> cells = {})
      : w_(width), h_(height), f_(channels), nb_(nb), boundary_(boundary), cells_(std::move(cells)) {
    if (w_ == 0 || h_ == 0) throw PreconditionError("lattice dimensions must be positive");
    if (f_ == 0) throw PreconditionError("channel count must be positive");
    if (cells_.empty()) cells_.assign(w_ * h_, 0);
    if (cells_.size() != w_ * h_)
      throw PreconditionError("cell array holds " + std::to_string(cells_.size()) + " values, expected " +
                              std::to_string(w_ * h_));
    for (Channel c : cells_)
      if (c >= f_) throw PreconditionError("channel " + std::to_string(c) + " >= channel count " + std::to_string(f_));
    build_neighbors();
  }

  std::size_t width() const noexcept { return w_; }
  std::size_t height() const noexcept { return h_; }
  std::size_t size() const noexcept { return cells_.size(); }
  Channel channels() const noexcept { return f_; }
  Neighborhood neighborhood() const noexcept { return nb_; }
  Boundary boundary() const noexcept { return boundary_; }

  std::size_t index(std::size_t x, std::size_t y) const noexcept { return y * w_ + x; }
  CellCoord coord(std::size_t idx) const noexcept { return {idx % w_, idx / w_}; }

  Channel at(std::size_t idx) const { return cells_.at(idx); }
  Channel at(std::size_t x, std::size_t y) const { return cells_.at(index(x, y)); }
  void set(std::size_t idx, Channel c) {
    if (c >= f_) throw PreconditionError("channel " + std::to_string(c) + " >= channel count " + std::to_string(f_));
    cells_.at(idx) = c;
  }
  void set(std::size_t x, std::size_t y, Channel c) { set(index(x, y), c); }
  const std::vector<Channel>& cells() const noexcept { return cells_; }

  // Interfering cells of idx: distinct, excluding idx itself. Small tori can
  // wrap two offsets onto the same cell; it is listed once.
  const std::vector<std::size_t>& neighbors(std::size_t idx) const { return (*neighbors_).at(idx); }

  friend bool operator==(const ChannelLattice& a, const ChannelLattice& b) {
    return a.w_ == b.w_ && a.h_ == b.h_ && a.f_ == b.f_ && a.nb_ == b.nb_ && a.boundary_ == b.boundary_ &&
           a.cells_ == b.cells_;
  }

 private:
  void build_neighbors() {
    auto table = std::make_shared<std::vector<std::vector<std::size_t>>>(cells_.size());
    const auto w = static_cast<long long>(w_), h = static_cast<long long>(h_);
    for (long long y = 0; y < h; ++y)
      for (long long x = 0; x < w; ++x) {
        auto& list = (*table)[index(static_cast<std::size_t>(x), static_cast<std::size_t>(y))];
        for (long long dy = -1; dy <= 1; ++dy)
          for (long long dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            if (nb_ == Neighborhood::von_neumann && dx != 0 && dy != 0) continue;
            long long nx = x + dx, ny = y + dy;
            if (boundary_ == Boundary::toroidal) {
              nx = (nx % w + w) % w;
              ny = (ny % h + h) % h;
            } else if (nx < 0 || ny < 0 || nx >= w || ny >= h) {
              continue;
            }
            const auto n = index(static_cast<std::size_t>(nx), static_cast<std::size_t>(ny));
            if (n != index(static_cast<std::size_t>(x), static_cast<std::size_t>(y))) list.push_back(n);
          }
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
      }
    neighbors_ = std::move(table);
  }

  std::size_t w_, h_;
  Channel f_;
  Neighborhood nb_;
  Boundary boundary_;
  std::vector<Channel> cells_;
  std::shared_ptr<const std::vector<std::vector<std::size_t>>> neighbors_;
};

// Unordered neighbour pairs sharing a channel; 0 means interference-free.
inline std::size_t conflict_count(const ChannelLattice& l) {
  std::size_t conflicts = 0;
  for (std::size_t i = 0; i < l.size(); ++i)
    for (std::size_t n : l.neighbors(i))
      if (n > i && l.at(n) == l.at(i)) ++conflicts;
  return conflicts;
}

// Number of neighbours of idx sharing its channel.
inline std::size_t cell_conflicts(const ChannelLattice& l, std::size_t idx) {
  std::size_t c = 0;
  for (std::size_t n : l.neighbors(idx))
    if (l.at(n) == l.at(idx)) ++c;
  return c;
}

// ---------------------------------------------------------------------------
// Lattice text format: header `W H F`, then H rows of W integers in [0, F).
// A stream may hold several lattices back to back; '#' starts a comment.
// ---------------------------------------------------------------------------

inline std::vector<ChannelLattice> read_lattices(std::istream& in, Neighborhood nb = Neighborhood::moore,
                                                 Boundary boundary = Boundary::toroidal) {
  std::vector<long long> tokens;
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::size_t> token_line;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      long long v = 0;
      std::size_t used = 0;
      try {
        v = std::stoll(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size()) throw InputError("line " + std::to_string(lineno) + ": '" + tok + "' is not an integer");
      tokens.push_back(v);
      token_line.push_back(lineno);
    }
  }
  std::vector<ChannelLattice> out;
  std::size_t pos = 0;
  while (pos < tokens.size()) {
    if (pos + 3 > tokens.size()) throw InputError("truncated lattice header near line " + std::to_string(token_line[pos]));
    const long long w = tokens[pos], h = tokens[pos + 1], f = tokens[pos + 2];
    if (w <= 0 || h <= 0 || f <= 0)
      throw InputError("line " + std::to_string(token_line[pos]) + ": lattice header 'W H F' needs positive values");
    pos += 3;
    const auto count = static_cast<std::size_t>(w * h);
    if (pos + count > tokens.size()) throw InputError("lattice body truncated: expected " + std::to_string(count) + " cells");
    std::vector<Channel> cells(count);
    for (std::size_t i = 0; i < count; ++i) {
      const long long v = tokens[pos + i];
      if (v < 0 || v >= f)
        throw InputError("line " + std::to_string(token_line[pos + i]) + ": channel " + std::to_string(v) +
                         " outside [0, " + std::to_string(f) + ")");
      cells[i] = static_cast<Channel>(v);
    }
    pos += count;
    out.emplace_back(static_cast<std::size_t>(w), static_cast<std::size_t>(h), static_cast<Channel>(f), nb, boundary,
                     std::move(cells));
  }
  return out;
}

inline void write_lattice(std::ostream& out, const ChannelLattice& l) {
  out << l.width() << ' ' << l.height() << ' ' << l.channels() << '\n';
  for (std::size_t y = 0; y < l.height(); ++y) {
    for (std::size_t x = 0; x < l.width(); ++x) out << (x ? " " : "") << l.at(x, y);
    out << '\n';
  }
}

}  // namespace cxnet
