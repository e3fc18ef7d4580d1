#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "standoff/annotation.hpp"
#include "standoff/document.hpp"
#include "standoff/sqlite.hpp"

namespace standoff {

using InstanceId = std::int64_t;
using InstanceSetId = std::int64_t;

// Canonical text form of a key->text map: a JSON object with sorted keys
// and no whitespace. The same map always gives the same bytes.
std::string serialize_map(const AttributeMap& map);
// Throws ParseError if the text is not a JSON object of strings.
AttributeMap deserialize_map(std::string_view text);

// Reserved key under which an annotation's provenance is kept in `data`.
inline constexpr const char* kProvenanceKey = "_provenance";

enum class InstanceKind { kDocument, kAnnotationPair, kDocumentSet };

std::string_view instance_kind_name(InstanceKind kind);
// Throws ValidationError for an unknown name.
InstanceKind parse_instance_kind(std::string_view name);

struct AnnotationRef {
  AnnotationId annotation_id = 0;
  DocumentId document_id = 0;
  Interval span;

  friend bool operator==(const AnnotationRef&, const AnnotationRef&) = default;
};

struct MarshalCounts {
  std::size_t document_rows = 0;
  std::size_t annotation_rows = 0;
};

struct CheckpointOptions {
  // Test hook: abort the transaction after this many row writes.
  std::optional<std::size_t> fail_after_writes;
};

struct DocumentSummary {
  DocumentId id = 0;
  std::string name;
  std::size_t size = 0;
};

// The relational store behind the common data model. One instance owns
// one connection and must not be shared between threads; open a second
// store on the same file for parallel work on other documents.
class CdmStore {
 public:
  // Connection strings: "sqlite:PATH", "sqlite::memory:", or a bare path.
  // Throws StoreUnreachableError when the engine is unknown or the store
  // cannot be opened.
  static CdmStore open(std::string_view connection);

  CdmStore(CdmStore&&) noexcept;
  CdmStore& operator=(CdmStore&&) noexcept;
  ~CdmStore();

  // Creates missing tables and indexes. Returns the tables created by this
  // call (empty when the schema was already there). Throws
  // MigrationRequiredError when a table exists with different columns.
  std::vector<std::string> init_schema();
  static std::string schema_ddl();
  static const std::vector<std::string>& table_names();
  std::vector<std::string> existing_tables();
  std::size_t row_count(std::string_view table);

  // --- corpora -----------------------------------------------------------
  CorpusId create_corpus(std::string_view name, std::string_view description = {},
                         const AttributeMap& data = {});
  std::optional<CorpusId> find_corpus(std::string_view name);
  Corpus load_corpus(CorpusId id);
  void add_to_corpus(CorpusId corpus, DocumentId document);

  // --- documents ---------------------------------------------------------
  // First call inserts the document row and every annotation; later calls
  // behave like checkpoint(). All or nothing.
  MarshalCounts marshal_document(Document& doc);
  Document unmarshal_document(DocumentId id);
  std::optional<DocumentId> find_document(std::string_view name);
  std::vector<DocumentSummary> list_documents();

  // Writes the dirty and removed annotations (and metadata, if changed) in
  // one transaction. Returns the number of annotation rows written. On a
  // ConflictError nothing is written and the dirty state is kept.
  std::size_t checkpoint(Document& doc, const CheckpointOptions& options = {});

  // Exact, case-sensitive match on (type, value). Unknown type -> empty.
  std::vector<AnnotationRef> query_by_value(std::string_view type, std::string_view value);

  std::optional<std::int64_t> find_annotation_type(std::string_view name);
  std::int64_t ensure_annotation_type(std::string_view name);

  // --- instances ---------------------------------------------------------
  InstanceId create_instance(CorpusId corpus, InstanceKind kind,
                             std::span<const std::int64_t> content_ids,
                             const AttributeMap& data = {});
  InstanceKind instance_kind(InstanceId id);
  std::vector<std::int64_t> instance_content(InstanceId id);
  InstanceSetId create_instance_set(CorpusId corpus, std::string_view name,
                                    std::string_view purpose,
                                    std::span<const InstanceId> instances,
                                    const AttributeMap& data = {});
  std::optional<InstanceSetId> find_instance_set(CorpusId corpus, std::string_view name);
  std::vector<InstanceId> instance_set_members(InstanceSetId id);
  void set_groundtruth(InstanceId instance, std::string_view task, std::string_view label,
                       const AttributeMap& data = {});
  std::optional<std::string> groundtruth(InstanceId instance, std::string_view task);

  // Rows in the join tables whose references no longer resolve. Empty on a
  // healthy store.
  std::vector<std::string> orphan_report();

  sql::Connection& connection() noexcept { return *conn_; }

 private:
  explicit CdmStore(std::unique_ptr<sql::Connection> conn);

  std::string type_name(std::int64_t type_id);
  std::size_t write_changes(Document& doc, const CheckpointOptions& options,
                            std::vector<std::pair<AnnotationId, AnnotationId>>& renames);

  std::unique_ptr<sql::Connection> conn_;
  std::map<std::string, std::int64_t, std::less<>> type_ids_;
};

}  // namespace standoff
