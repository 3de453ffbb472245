#include <algorithm>
#include <unordered_map>

#include "chefs/analytics.hpp"
#include "chefs/error.hpp"
#include "chefs/parallel.hpp"

namespace chefs {

namespace {

class Interner {
public:
    std::uint32_t get(const std::string& key, std::vector<std::string>* names) {
        const auto [it, inserted] = index_.try_emplace(key, static_cast<std::uint32_t>(index_.size()));
        if (inserted && names) names->push_back(key);
        return it->second;
    }
    std::uint32_t get(const std::string& key, std::vector<Dataset::Term>& terms) {
        const auto [it, inserted] = index_.try_emplace(key, static_cast<std::uint32_t>(index_.size()));
        if (inserted) terms.push_back({key, std::nullopt});
        return it->second;
    }
    std::optional<std::uint32_t> find(const std::string& key) const {
        const auto it = index_.find(key);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

private:
    std::unordered_map<std::string, std::uint32_t> index_;
};

void keep_smallest(Dataset::Term& term, const Field& name) {
    if (name && (!term.full_name || *name < *term.full_name)) term.full_name = name;
}

}  // namespace

Dataset Dataset::load(const Store& store, unsigned jobs) {
    Dataset d;
    d.store_checksum_ = store.checksum();
    const auto parts = store.valid_partitions();
    Interner sample_ids, product_ids, contaminant_ids, country_ids, eval_ids;
    const std::string unknown(kUnknownCountry);

    const std::size_t window = std::max(1u, jobs);
    for (std::size_t begin = 0; begin < parts.size(); begin += window) {
        const std::size_t end = std::min(parts.size(), begin + window);
        std::vector<PartitionData> loaded(end - begin);
        parallel_for(end - begin, jobs, [&](std::size_t k) { loaded[k] = read_partition(*parts[begin + k]); });

        for (std::size_t k = 0; k < loaded.size(); ++k) {
            auto& data = loaded[k];
            d.manifests_.push_back(*parts[begin + k]->manifest);
            for (const auto& s : data.samples) {
                const auto before = d.samples_.size();
                const auto idx = sample_ids.get(s.sample_id, nullptr);
                if (idx < before) {
                    d.samples_[idx].hazards |= s.hazards;
                    continue;
                }
                SampleRow row;
                row.product = product_ids.get(s.product_id, d.products_);
                keep_smallest(d.products_[row.product], s.product_full_name);
                row.origin = country_ids.get(normalize_origin(s.origin_country), &d.countries_);
                row.sampling_country = country_ids.get(s.sampling_country, &d.countries_);
                row.year = s.sampling_year.value_or(0);
                row.strategy = s.strategy;
                row.hazards = s.hazards;
                d.samples_.push_back(row);
            }
            for (const auto& r : data.results) {
                ResultRow row;
                const auto sample = sample_ids.find(r.sample_id);
                if (!sample)
                    throw Error(ErrorCode::InvalidPartition,
                                parts[begin + k]->dir.string() + ": result " + r.result_id + " has no sample");
                row.sample = *sample;
                row.contaminant = contaminant_ids.get(r.contaminant_id, d.contaminants_);
                keep_smallest(d.contaminants_[row.contaminant], r.contaminant_full_name);
                row.eval_code = eval_ids.get(r.eval_code.text(), &d.eval_codes_);
                row.hazard = r.hazard;
                row.compliance = classify_evaluation(r.eval_code);
                d.results_.push_back(row);
            }
            data = {};
        }
    }
    return d;
}

}  // namespace chefs
