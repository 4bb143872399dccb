#include "skelevo/temporal_match.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "skelevo/errors.hpp"
#include "skelevo/parallel.hpp"

namespace skelevo {

namespace {

constexpr std::size_t kScanLimit = 32;

int floor_div(int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

}  // namespace

std::string_view to_string(PixelClass c) {
    switch (c) {
        case PixelClass::known: return "known";
        case PixelClass::growth: return "growth";
        case PixelClass::decay: return "decay";
        case PixelClass::irregular: return "irregular";
    }
    return "irregular";
}

GridIndex::GridIndex(const PixelSet& targets, int cell_size) : targets_(&targets), cell_size_(cell_size) {
    if (cell_size < 1) throw ParameterError("grid cell size must be positive");
    if (targets.size() <= kScanLimit) return;

    int max_x = std::numeric_limits<int>::min();
    int max_y = std::numeric_limits<int>::min();
    min_x_ = std::numeric_limits<int>::max();
    min_y_ = std::numeric_limits<int>::max();
    for (Pixel p : targets.pixels()) {
        min_x_ = std::min(min_x_, p.x);
        min_y_ = std::min(min_y_, p.y);
        max_x = std::max(max_x, p.x);
        max_y = std::max(max_y, p.y);
    }
    cols_ = (max_x - min_x_) / cell_size_ + 1;
    rows_ = (max_y - min_y_) / cell_size_ + 1;

    // Counting sort into cells; ids stay ascending within each cell.
    const std::size_t cells = static_cast<std::size_t>(cols_) * static_cast<std::size_t>(rows_);
    cell_start_.assign(cells + 1, 0);
    auto cell_of = [&](Pixel p) {
        return static_cast<std::size_t>((p.y - min_y_) / cell_size_) * static_cast<std::size_t>(cols_) +
               static_cast<std::size_t>((p.x - min_x_) / cell_size_);
    };
    for (Pixel p : targets.pixels()) ++cell_start_[cell_of(p) + 1];
    for (std::size_t c = 0; c < cells; ++c) cell_start_[c + 1] += cell_start_[c];
    cell_items_.resize(targets.size());
    std::vector<int> fill(cell_start_.begin(), cell_start_.end() - 1);
    for (std::size_t i = 0; i < targets.size(); ++i) {
        cell_items_[static_cast<std::size_t>(fill[cell_of(targets[i])]++)] = static_cast<int>(i);
    }
}

int GridIndex::nearest_scan(Pixel q) const {
    int best = -1;
    std::int64_t best_d2 = std::numeric_limits<std::int64_t>::max();
    for (std::size_t i = 0; i < targets_->size(); ++i) {
        const std::int64_t d2 = squared_distance(q, (*targets_)[i]);
        if (d2 < best_d2) {
            best_d2 = d2;
            best = static_cast<int>(i);
        }
    }
    return best;
}

int GridIndex::nearest(Pixel q) const {
    if (targets_->empty()) return -1;
    if (cell_start_.empty()) return nearest_scan(q);

    const int qc = floor_div(q.x - min_x_, cell_size_);
    const int qr = floor_div(q.y - min_y_, cell_size_);
    // Ring radius past which every cell of the grid has been visited.
    const int last_ring = std::max({qc, cols_ - 1 - qc, qr, rows_ - 1 - qr});

    int best = -1;
    std::int64_t best_d2 = std::numeric_limits<std::int64_t>::max();
    auto visit = [&](int c, int r) {
        if (c < 0 || r < 0 || c >= cols_ || r >= rows_) return;
        const std::size_t cell = static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) +
                                 static_cast<std::size_t>(c);
        for (int k = cell_start_[cell]; k < cell_start_[cell + 1]; ++k) {
            const int id = cell_items_[static_cast<std::size_t>(k)];
            const std::int64_t d2 = squared_distance(q, (*targets_)[static_cast<std::size_t>(id)]);
            if (d2 < best_d2 || (d2 == best_d2 && id < best)) {
                best_d2 = d2;
                best = id;
            }
        }
    };

    // Rings that lie entirely outside the grid are skipped up front.
    const int first_ring = std::max({0, -qc, qc - (cols_ - 1), -qr, qr - (rows_ - 1)});
    for (int ring = first_ring; ring <= last_ring; ++ring) {
        if (ring == 0) {
            visit(qc, qr);
        } else {
            for (int c = qc - ring; c <= qc + ring; ++c) {
                visit(c, qr - ring);
                visit(c, qr + ring);
            }
            for (int r = qr - ring + 1; r <= qr + ring - 1; ++r) {
                visit(qc - ring, r);
                visit(qc + ring, r);
            }
        }
        // Any pixel in ring+1 or beyond is at least ring*cell+1 away on one axis.
        // Strict comparison keeps equidistant candidates with smaller ids reachable.
        const std::int64_t bound = static_cast<std::int64_t>(ring) * cell_size_ + 1;
        if (best >= 0 && best_d2 < bound * bound) break;
    }
    return best;
}

void classify(MatchSet& m) {
    m.classification.assign(m.next_size, PixelClass::growth);
    m.forward_in.assign(m.next_size, 0);
    if (m.degenerate()) return;

    std::vector<int> backward_in(m.prev_size, 0);
    for (int q : m.forward) ++m.forward_in[static_cast<std::size_t>(q)];
    for (int p : m.backward) ++backward_in[static_cast<std::size_t>(p)];

    for (std::size_t q = 0; q < m.next_size; ++q) {
        const auto p = static_cast<std::size_t>(m.backward[q]);
        const bool reciprocal = m.forward[p] == static_cast<int>(q);
        const int incoming = m.forward_in[q];
        const int other_incoming = incoming - (reciprocal ? 1 : 0);
        const int shared = backward_in[p] - 1;

        PixelClass c = PixelClass::irregular;
        if (reciprocal && incoming == 1 && shared == 0) {
            c = PixelClass::known;
        } else if (other_incoming <= 1 && (reciprocal || incoming == 0)) {
            c = PixelClass::growth;
        } else if (reciprocal && shared <= 1) {
            c = PixelClass::decay;
        }
        m.classification[q] = c;
    }
}

MatchSet match(const PixelSet& prev, const PixelSet& next) {
    MatchSet m;
    m.from_index = prev.index();
    m.to_index = next.index();
    m.prev_size = prev.size();
    m.next_size = next.size();
    if (!m.degenerate()) {
        const GridIndex to_next(next);
        const GridIndex to_prev(prev);
        m.forward.resize(prev.size());
        m.backward.resize(next.size());
        for (std::size_t i = 0; i < prev.size(); ++i) m.forward[i] = to_next.nearest(prev[i]);
        for (std::size_t j = 0; j < next.size(); ++j) m.backward[j] = to_prev.nearest(next[j]);
    }
    classify(m);
    return m;
}

std::vector<MatchSet> match_all(std::span<const PixelSet> sequence, int jobs) {
    if (sequence.size() < 2) {
        throw InputError("matching needs at least 2 time steps, got " + std::to_string(sequence.size()));
    }
    std::vector<MatchSet> out(sequence.size() - 1);
    parallel_for(out.size(), jobs, [&](std::size_t i) { out[i] = match(sequence[i], sequence[i + 1]); });
    return out;
}

std::string matches_csv(const PixelSet& prev, const PixelSet& next, const MatchSet& m) {
    std::ostringstream out;
    out << "direction,from_x,from_y,to_x,to_y\n";
    for (std::size_t i = 0; i < m.forward.size(); ++i) {
        const Pixel a = prev[i];
        const Pixel b = next[static_cast<std::size_t>(m.forward[i])];
        out << "forward," << a.x << ',' << a.y << ',' << b.x << ',' << b.y << '\n';
    }
    for (std::size_t j = 0; j < m.backward.size(); ++j) {
        const Pixel a = next[j];
        const Pixel b = prev[static_cast<std::size_t>(m.backward[j])];
        out << "backward," << a.x << ',' << a.y << ',' << b.x << ',' << b.y << '\n';
    }
    return out.str();
}

std::string classification_csv(const PixelSet& next, const MatchSet& m) {
    std::ostringstream out;
    out << "x,y,class\n";
    for (std::size_t j = 0; j < m.classification.size(); ++j) {
        out << next[j].x << ',' << next[j].y << ',' << to_string(m.classification[j]) << '\n';
    }
    return out.str();
}

}  // namespace skelevo
