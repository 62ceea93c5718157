// Copyright 2026 The Harness Authors
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

#include <algorithm>
#include <map>

#include "harness/agents/agents.hpp"
#include "harness/common/error.hpp"
#include "harness/corpus/text.hpp"

namespace harness::agents {

PolicyDocument policy_from_document(const corpus::Document& doc) {
  return {doc.doc_id, doc.event_name, doc.primary_text(), doc.origin.value_or("external")};
}

PolicyIndex::PolicyIndex(const corpus::CorpusStore& policies, index::VectorIndex vectors)
    : store_(&policies), vectors_(std::move(vectors)) {
  if (vectors_.size() != policies.chunks().size()) {
    throw ValidationError("policy index does not match the policy corpus");
  }
}

json to_json(const PolicyMatch& m) {
  return {{"subject_ref", m.subject_ref}, {"policy_id", m.policy_id}, {"sim", round6(m.sim)}, {"excerpt", m.excerpt}};
}

PolicyAlignment match_policies(const std::vector<PolicySubject>& subjects, const PolicyIndex& policies,
                               const index::Embedder& embedder, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ValidationError("policy threshold must be within [0, 1]");
  PolicyAlignment out;
  if (subjects.empty()) return out;
  if (policies.empty() || policies.vectors().empty()) {
    out.warnings.push_back("policy corpus is empty; no policy mappings were made");
    for (const auto& s : subjects) out.unmapped.push_back(s.ref);
    return out;
  }
  if (policies.vectors().backend().backend_id != embedder.descriptor().backend_id) {
    throw ValidationError("policy index was built with backend '" + policies.vectors().backend().backend_id +
                          "' but the active backend is '" + embedder.descriptor().backend_id + "'");
  }

  std::vector<std::string> texts;
  for (const auto& s : subjects) texts.push_back(s.text);
  const auto vecs = embedder.embed_batch(texts);
  const auto& ids = policies.vectors().ids();
  const auto* store = policies.store();

  for (std::size_t s = 0; s < subjects.size(); ++s) {
    const auto scores = policies.vectors().score_all(vecs[s]);
    // Best chunk per policy document; ids are visited in ascending order on ties.
    std::map<std::string, std::pair<double, std::size_t>> best;
    for (std::size_t row = 0; row < ids.size(); ++row) {
      const auto* chunk = store->find_chunk(ids[row]);
      if (chunk == nullptr) continue;
      auto [it, inserted] = best.try_emplace(chunk->doc_id, scores[row], row);
      if (!inserted) {
        auto& [score, r] = it->second;
        if (scores[row] > score || (scores[row] == score && ids[row] < ids[r])) {
          score = scores[row];
          r = row;
        }
      }
    }
    std::vector<PolicyMatch> found;
    for (const auto& [policy_id, hit] : best) {
      const double sim = std::clamp(hit.first, 0.0, 1.0);
      if (sim < threshold) continue;
      const auto* chunk = store->find_chunk(ids[hit.second]);
      std::string excerpt = chunk->text;
      while (!excerpt.empty() && excerpt.back() == ' ') excerpt.pop_back();
      found.push_back({subjects[s].ref, policy_id, sim, std::move(excerpt)});
    }
    std::sort(found.begin(), found.end(), [](const PolicyMatch& a, const PolicyMatch& b) {
      if (a.sim != b.sim) return a.sim > b.sim;
      return a.policy_id < b.policy_id;
    });
    if (found.empty()) out.unmapped.push_back(subjects[s].ref);
    for (auto& m : found) out.matches.push_back(std::move(m));
  }
  return out;
}

}  // namespace harness::agents
