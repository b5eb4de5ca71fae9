// SPDX-License-Identifier: Apache-2.0
//
// hybeam: hybrid precoder / combiner design for multi-group multicasting
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <stdexcept>
#include <vector>

namespace hybeam {

/// Partition of the user indices {0..K-1} into G disjoint multicast groups.
class GroupAssignment {
public:
    GroupAssignment() = default;

    explicit GroupAssignment(std::vector<std::vector<int>> members) : members_(std::move(members))
    {
        int k = 0;
        for (const auto& g : members_)
            k += int(g.size());
        group_of_.assign(k, -1);
        for (int i = 0; i < int(members_.size()); ++i) {
            for (int u : members_[i]) {
                if (u < 0 || u >= k)
                    throw std::invalid_argument("GroupAssignment: user index out of range");
                if (group_of_[u] != -1)
                    throw std::invalid_argument("GroupAssignment: groups are not disjoint");
                group_of_[u] = i;
            }
        }
        // disjoint + sizes summing to K forces a partition
    }

    /// Users 0..K-1 split into G contiguous blocks, first K%G blocks one larger.
    static GroupAssignment even_split(int num_users, int num_groups)
    {
        if (num_users < 1 || num_groups < 1 || num_groups > num_users)
            throw std::invalid_argument("GroupAssignment: need 1 <= G <= K");
        std::vector<std::vector<int>> members(num_groups);
        const int base = num_users / num_groups;
        const int extra = num_users % num_groups;
        int u = 0;
        for (int i = 0; i < num_groups; ++i) {
            const int sz = base + (i < extra ? 1 : 0);
            for (int j = 0; j < sz; ++j)
                members[i].push_back(u++);
        }
        return GroupAssignment(std::move(members));
    }

    int num_groups() const { return int(members_.size()); }
    int num_users() const { return int(group_of_.size()); }
    int group_of(int user) const { return group_of_.at(user); }
    const std::vector<int>& members(int group) const { return members_.at(group); }

private:
    std::vector<std::vector<int>> members_;
    std::vector<int> group_of_;
};

} // namespace hybeam
