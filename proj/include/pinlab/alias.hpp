#pragma once

#include <stdexcept>
#include <vector>

#include "pinlab/rng.hpp"

namespace pinlab {

// Walker alias table: O(1) draws from a fixed discrete distribution.
class AliasTable {
  public:
    AliasTable() = default;

    explicit AliasTable(const std::vector<double>& weights) {
        const int n = static_cast<int>(weights.size());
        total_ = 0.0;
        for (double w : weights) {
            if (w < 0.0) throw std::invalid_argument("AliasTable: negative weight");
            total_ += w;
        }
        if (!(total_ > 0.0)) throw std::invalid_argument("AliasTable: zero total weight");
        prob_.assign(n, 0.0);
        alt_.assign(n, 0);
        std::vector<double> scaled(n);
        std::vector<int> small, large;
        for (int i = 0; i < n; ++i) {
            scaled[i] = weights[i] * n / total_;
            (scaled[i] < 1.0 ? small : large).push_back(i);
        }
        while (!small.empty() && !large.empty()) {
            int s = small.back(), l = large.back();
            small.pop_back();
            prob_[s] = scaled[s];
            alt_[s] = l;
            scaled[l] -= 1.0 - scaled[s];
            if (scaled[l] < 1.0) {
                large.pop_back();
                small.push_back(l);
            }
        }
        for (int i : large) prob_[i] = 1.0;
        for (int i : small) prob_[i] = 1.0;
    }

    int sample(RngStream& rng) const {
        double u = rng.uniform() * prob_.size();
        int i = static_cast<int>(u);
        if (i >= static_cast<int>(prob_.size())) i = static_cast<int>(prob_.size()) - 1;
        return (u - i < prob_[i]) ? i : alt_[i];
    }

    double total() const { return total_; }
    bool empty() const { return prob_.empty(); }

  private:
    std::vector<double> prob_;
    std::vector<int> alt_;
    double total_ = 0.0;
};

} // namespace pinlab
