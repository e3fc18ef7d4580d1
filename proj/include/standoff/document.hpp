#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "standoff/annotation.hpp"
#include "standoff/annotation_index.hpp"
#include "standoff/utf8.hpp"

namespace standoff {

struct Corpus {
  CorpusId id = 0;
  std::string name;
  std::string description;
  AttributeMap metadata;
  std::set<DocumentId> documents;
};

// A document owns its text and the stand-off annotations over it. The text
// never changes after construction; annotations carry character offsets
// into it.
//
// Change tracking: every add/update/remove since the last sync is recorded
// so a store can write just those rows. The store also keeps a baseline
// copy of each persisted annotation here, which it uses to detect rows
// changed behind this document's back.
class Document {
 public:
  Document(std::string name, std::string content, AttributeMap metadata = {});

  DocumentId id() const noexcept { return id_; }
  const std::string& name() const noexcept { return name_; }
  const std::string& content() const noexcept { return content_; }
  std::size_t length() const noexcept { return utf8_.char_count(); }
  // Text covered by a span. Throws BoundsError when the span is outside.
  std::string_view text(const Interval& span) const;

  const AttributeMap& metadata() const noexcept { return metadata_; }
  void set_metadata(std::string key, std::string value);
  const std::string& source() const noexcept { return source_; }
  void set_source(std::string source) { source_ = std::move(source); }

  // Assigns a provisional id when ann.id == 0. Throws BoundsError for spans
  // past the end of the text and DuplicateError for a reused id.
  AnnotationId add_annotation(Annotation ann);
  // Replaces the annotation with the same id (span, type, value, ...).
  void update_annotation(const Annotation& ann);
  void remove_annotation(AnnotationId id);

  const Annotation* find(AnnotationId id) const { return index_.find(id); }
  const Annotation& get(AnnotationId id) const;
  const AnnotationIndex& index() const noexcept { return index_; }
  std::size_t annotation_count() const noexcept { return index_.size(); }

  std::vector<const Annotation*> annotations_satisfying(
      AllenRelation rel, const Interval& b,
      std::optional<std::string_view> type = std::nullopt) const;

  // The first k annotations (canonical order) that start at or after the
  // anchor's end, so adjacent spans are included. The anchor itself is
  // never returned.
  std::vector<const Annotation*> next_annotations(
      const Annotation& anchor, std::size_t k,
      std::optional<std::string_view> type = std::nullopt) const;

  // --- change tracking, driven by the store ---------------------------
  const std::set<AnnotationId>& dirty() const noexcept { return dirty_; }
  const std::set<AnnotationId>& removed() const noexcept { return removed_; }
  bool metadata_dirty() const noexcept { return metadata_dirty_; }
  bool persisted() const noexcept { return id_ != 0; }
  const Annotation* baseline(AnnotationId id) const;

  // Store-side hooks.
  void assign_id(DocumentId id);
  // Loads an annotation that already exists in the store (no dirty mark).
  void restore_annotation(Annotation ann);
  // Called after a successful write: applies provisional->store id
  // renames, snapshots the written rows as the new baseline, and clears
  // the dirty state.
  void commit_sync(const std::vector<std::pair<AnnotationId, AnnotationId>>& renames);

 private:
  void check_bounds(const Interval& span) const;

  DocumentId id_ = 0;
  std::string name_;
  std::string content_;
  std::string source_;
  Utf8Index utf8_;
  AttributeMap metadata_;
  AnnotationIndex index_;
  AnnotationId next_provisional_ = kProvisionalIdBase;

  std::set<AnnotationId> dirty_;
  std::set<AnnotationId> removed_;
  bool metadata_dirty_ = false;
  std::unordered_map<AnnotationId, Annotation> baseline_;
};

}  // namespace standoff
