#pragma once
// Entity-count features over PER, NORP and ORG mentions.

#include "hsd/io.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hsd {

struct Dataset;

enum class EntityLabel { PER = 0, NORP = 1, ORG = 2 };

inline constexpr std::array<EntityLabel, 3> kEntityLabels = {EntityLabel::PER, EntityLabel::NORP, EntityLabel::ORG};

std::string_view entity_label_name(EntityLabel label);
/// nullopt for any label outside the kept three.
std::optional<EntityLabel> parse_entity_label(std::string_view name);

struct EntitySpan {
    std::string example_id;
    EntityLabel label = EntityLabel::PER;
    std::int64_t start_token = 0;
    std::int64_t end_token = 0;  // exclusive
    std::string surface;

    friend bool operator==(const EntitySpan&, const EntitySpan&) = default;
};

struct EntityCountVector {
    std::uint64_t per = 0;
    std::uint64_t norp = 0;
    std::uint64_t org = 0;

    std::array<double, 3> as_features() const {
        return {static_cast<double>(per), static_cast<double>(norp), static_cast<double>(org)};
    }
    friend bool operator==(const EntityCountVector&, const EntityCountVector&) = default;
};

/// Per-label cardinality; every span counts once, overlapping or not.
EntityCountVector count_entities(std::span<const EntitySpan> spans);

/// Case-insensitive phrase lists, one per label. Phrases are normalized
/// with the bag-of-words tokenizer.
class Gazetteer {
public:
    /// Throws DataError on an empty phrase or a duplicate within the label.
    void add(EntityLabel label, std::string_view phrase);

    std::size_t longest_phrase() const noexcept { return longest_; }
    /// Label of the exact token sequence (joined with ' '), highest priority first.
    std::optional<EntityLabel> lookup(std::string_view joined_tokens) const;
    const std::vector<std::string>& phrases(EntityLabel label) const {
        return phrases_[static_cast<std::size_t>(label)];
    }

private:
    std::array<std::vector<std::string>, 3> phrases_;
    std::array<std::unordered_map<std::string, std::size_t>, 3> index_;
    std::size_t longest_ = 0;
};

/// Gazetteer file: {"PER": [phrases], "NORP": [...], "ORG": [...]}.
Gazetteer parse_gazetteer(std::string_view content);
Gazetteer load_gazetteer(const std::filesystem::path& path);
std::string gazetteer_to_json(const Gazetteer& gaz);

/// Greedy left-to-right longest match, non-overlapping. On equal length the
/// label priority is PER > NORP > ORG.
std::vector<EntitySpan> gazetteer_recognize(std::string_view text, const Gazetteer& gaz,
                                            std::string_view example_id = {});

using AnnotationMap = std::map<std::string, std::vector<EntitySpan>>;

/// Annotation JSONL: {"example_id", "label", "start_token", "end_token", "surface"}.
/// Spans with labels outside PER/NORP/ORG are dropped.
AnnotationMap parse_annotations(std::string_view content);
AnnotationMap load_annotations(const std::filesystem::path& path);

/// Columns per, norp, org; examples without spans get zeros.
FeatureTable entity_table(const Dataset& dataset, const AnnotationMap& annotations);
FeatureTable entity_table(const Dataset& dataset, const Gazetteer& gaz);

}  // namespace hsd
