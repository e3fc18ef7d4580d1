#include "standoff/cdm_store.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "standoff/errors.hpp"

namespace standoff {

namespace {

struct TableDef {
  const char* name;
  std::vector<std::string> columns;
  const char* body;
};

const std::vector<TableDef>& tables() {
  static const std::vector<TableDef> defs = {
      {"corpora",
       {"id", "name", "description", "data"},
       "id INTEGER PRIMARY KEY AUTOINCREMENT,\n"
       "  name TEXT NOT NULL,\n"
       "  description TEXT NOT NULL DEFAULT '',\n"
       "  data TEXT NOT NULL DEFAULT '{}'"},
      {"documents",
       {"id", "name", "source", "size", "data", "content"},
       "id INTEGER PRIMARY KEY AUTOINCREMENT,\n"
       "  name TEXT NOT NULL,\n"
       "  source TEXT NOT NULL DEFAULT '',\n"
       "  size INTEGER NOT NULL,\n"
       "  data TEXT NOT NULL DEFAULT '{}',\n"
       "  content TEXT NOT NULL"},
      {"corpora_documents",
       {"corpus_id", "document_id"},
       "corpus_id INTEGER NOT NULL REFERENCES corpora(id) ON DELETE CASCADE,\n"
       "  document_id INTEGER NOT NULL REFERENCES documents(id) ON DELETE CASCADE,\n"
       "  PRIMARY KEY (corpus_id, document_id)"},
      {"annotation_types",
       {"id", "name", "description"},
       "id INTEGER PRIMARY KEY AUTOINCREMENT,\n"
       "  name TEXT NOT NULL,\n"
       "  description TEXT NOT NULL DEFAULT ''"},
      {"annotations",
       {"id", "document_id", "start", "end", "type_id", "value", "data"},
       "id INTEGER PRIMARY KEY AUTOINCREMENT,\n"
       "  document_id INTEGER NOT NULL REFERENCES documents(id) ON DELETE CASCADE,\n"
       "  \"start\" INTEGER NOT NULL,\n"
       "  \"end\" INTEGER NOT NULL,\n"
       "  type_id INTEGER NOT NULL REFERENCES annotation_types(id),\n"
       "  value TEXT NOT NULL DEFAULT '',\n"
       "  data TEXT NOT NULL DEFAULT '{}',\n"
       "  CHECK (\"start\" <= \"end\")"},
      {"instances",
       {"id", "corpus_id", "kind", "data"},
       "id INTEGER PRIMARY KEY AUTOINCREMENT,\n"
       "  corpus_id INTEGER NOT NULL REFERENCES corpora(id) ON DELETE CASCADE,\n"
       "  kind TEXT NOT NULL CHECK (kind IN ('document', 'annotation_pair', 'document_set')),\n"
       "  data TEXT NOT NULL DEFAULT '{}'"},
      {"instances_content",
       {"instance_id", "content_kind", "content_id"},
       "instance_id INTEGER NOT NULL REFERENCES instances(id) ON DELETE CASCADE,\n"
       "  content_kind TEXT NOT NULL CHECK (content_kind IN ('document', 'annotation')),\n"
       "  content_id INTEGER NOT NULL"},
      {"instance_sets",
       {"id", "corpus_id", "name", "purpose", "data"},
       "id INTEGER PRIMARY KEY AUTOINCREMENT,\n"
       "  corpus_id INTEGER NOT NULL REFERENCES corpora(id) ON DELETE CASCADE,\n"
       "  name TEXT NOT NULL,\n"
       "  purpose TEXT NOT NULL,\n"
       "  data TEXT NOT NULL DEFAULT '{}'"},
      {"instance_set_members",
       {"instance_set_id", "instance_id"},
       "instance_set_id INTEGER NOT NULL REFERENCES instance_sets(id) ON DELETE CASCADE,\n"
       "  instance_id INTEGER NOT NULL REFERENCES instances(id) ON DELETE CASCADE,\n"
       "  PRIMARY KEY (instance_set_id, instance_id)"},
      {"groundtruth",
       {"instance_id", "task", "label", "data"},
       "instance_id INTEGER NOT NULL REFERENCES instances(id) ON DELETE CASCADE,\n"
       "  task TEXT NOT NULL,\n"
       "  label TEXT NOT NULL,\n"
       "  data TEXT NOT NULL DEFAULT '{}'"},
      {"graphs",
       {"id", "name", "type", "data"},
       "id INTEGER PRIMARY KEY AUTOINCREMENT,\n"
       "  name TEXT NOT NULL,\n"
       "  type TEXT NOT NULL,\n"
       "  data TEXT NOT NULL DEFAULT '{}'"},
      {"linkage_graph",
       {"graph_id", "node1", "node2", "edge_label", "node1_label", "node2_label"},
       "graph_id INTEGER NOT NULL REFERENCES graphs(id) ON DELETE CASCADE,\n"
       "  node1 INTEGER NOT NULL,\n"
       "  node2 INTEGER NOT NULL,\n"
       "  edge_label TEXT NOT NULL,\n"
       "  node1_label TEXT NOT NULL,\n"
       "  node2_label TEXT NOT NULL"},
      {"sig_subgraph",
       {"id", "subgraph_graph_id", "support", "data"},
       "id INTEGER PRIMARY KEY AUTOINCREMENT,\n"
       "  subgraph_graph_id INTEGER NOT NULL REFERENCES graphs(id) ON DELETE CASCADE,\n"
       "  support INTEGER NOT NULL,\n"
       "  data TEXT NOT NULL DEFAULT '{}'"},
      {"lg_sigsub",
       {"graph_id", "sig_subgraph_id", "node_mapping"},
       "graph_id INTEGER NOT NULL REFERENCES graphs(id) ON DELETE CASCADE,\n"
       "  sig_subgraph_id INTEGER NOT NULL REFERENCES sig_subgraph(id) ON DELETE CASCADE,\n"
       "  node_mapping TEXT NOT NULL"},
  };
  return defs;
}

const char* const kIndexes[] = {
    "CREATE UNIQUE INDEX IF NOT EXISTS ux_corpora_name ON corpora(name)",
    "CREATE UNIQUE INDEX IF NOT EXISTS ux_documents_name ON documents(name)",
    "CREATE UNIQUE INDEX IF NOT EXISTS ux_annotation_types_name ON annotation_types(name)",
    "CREATE INDEX IF NOT EXISTS ix_annotations_document ON annotations(document_id)",
    "CREATE INDEX IF NOT EXISTS ix_annotations_type_value ON annotations(type_id, value)",
    "CREATE INDEX IF NOT EXISTS ix_annotations_position ON annotations(document_id, \"start\", \"end\")",
    "CREATE INDEX IF NOT EXISTS ix_corpora_documents_document ON corpora_documents(document_id)",
    "CREATE INDEX IF NOT EXISTS ix_instances_content_instance ON instances_content(instance_id)",
    "CREATE INDEX IF NOT EXISTS ix_instances_content_ref ON instances_content(content_kind, content_id)",
    "CREATE UNIQUE INDEX IF NOT EXISTS ux_instance_sets_name ON instance_sets(corpus_id, name)",
    "CREATE UNIQUE INDEX IF NOT EXISTS ux_groundtruth_task ON groundtruth(instance_id, task)",
    "CREATE INDEX IF NOT EXISTS ix_linkage_graph_graph ON linkage_graph(graph_id)",
    "CREATE INDEX IF NOT EXISTS ix_sig_subgraph_graph ON sig_subgraph(subgraph_graph_id)",
    "CREATE INDEX IF NOT EXISTS ix_lg_sigsub_graph ON lg_sigsub(graph_id)",
    "CREATE INDEX IF NOT EXISTS ix_lg_sigsub_pattern ON lg_sigsub(sig_subgraph_id)",
};

std::string create_table_sql(const TableDef& t) {
  return std::string("CREATE TABLE IF NOT EXISTS ") + t.name + " (\n  " + t.body + "\n)";
}

using RenameMap = std::map<AnnotationId, AnnotationId>;

// `renames` maps provisional ids already written in this transaction to
// their store ids, so references to them are stored resolved.
std::string annotation_data(const Annotation& ann, const RenameMap* renames = nullptr) {
  AttributeMap data = ann.attributes;
  if (renames != nullptr && !renames->empty()) {
    for (auto& [key, value] : data) {
      if (!is_reference_attribute(key)) continue;
      try {
        std::size_t used = 0;
        const auto id = static_cast<AnnotationId>(std::stoull(value, &used));
        if (used != value.size()) continue;
        if (auto it = renames->find(id); it != renames->end()) value = std::to_string(it->second);
      } catch (const std::exception&) {
      }
    }
  }
  if (!ann.provenance.empty()) data[kProvenanceKey] = ann.provenance;
  return serialize_map(data);
}

void split_annotation_data(std::string_view text, Annotation& ann) {
  ann.attributes = deserialize_map(text);
  if (auto it = ann.attributes.find(kProvenanceKey); it != ann.attributes.end()) {
    ann.provenance = std::move(it->second);
    ann.attributes.erase(it);
  }
}

std::int64_t as_db_id(AnnotationId id) { return static_cast<std::int64_t>(id); }

}  // namespace

std::string serialize_map(const AttributeMap& map) {
  nlohmann::json obj = nlohmann::json::object();
  for (const auto& [k, v] : map) obj[k] = v;
  // nlohmann::json objects are std::map backed, so keys come out sorted.
  return obj.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

AttributeMap deserialize_map(std::string_view text) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("bad data field: ") + e.what(), 0, e.byte);
  }
  if (!obj.is_object()) throw ParseError("data field is not an object", 0, 0);
  AttributeMap out;
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!it.value().is_string()) {
      throw ParseError("data field '" + it.key() + "' is not text", 0, 0);
    }
    out.emplace(it.key(), it.value().get<std::string>());
  }
  return out;
}

std::string_view instance_kind_name(InstanceKind kind) {
  switch (kind) {
    case InstanceKind::kDocument: return "document";
    case InstanceKind::kAnnotationPair: return "annotation_pair";
    case InstanceKind::kDocumentSet: return "document_set";
  }
  return "document";
}

InstanceKind parse_instance_kind(std::string_view name) {
  if (name == "document") return InstanceKind::kDocument;
  if (name == "annotation_pair") return InstanceKind::kAnnotationPair;
  if (name == "document_set") return InstanceKind::kDocumentSet;
  throw ValidationError("unknown instance kind '" + std::string(name) + "'");
}

CdmStore CdmStore::open(std::string_view connection) {
  std::string path;
  if (connection.starts_with("sqlite:")) {
    path = std::string(connection.substr(7));
  } else if (const auto colon = connection.find("://"); colon != std::string_view::npos) {
    throw StoreUnreachableError("unsupported store engine '" +
                                std::string(connection.substr(0, colon)) + "'");
  } else {
    path = std::string(connection);
  }
  if (path.empty()) throw StoreUnreachableError("empty store path");
  return CdmStore(std::make_unique<sql::Connection>(path));
}

CdmStore::CdmStore(std::unique_ptr<sql::Connection> conn) : conn_(std::move(conn)) {}
CdmStore::CdmStore(CdmStore&&) noexcept = default;
CdmStore& CdmStore::operator=(CdmStore&&) noexcept = default;
CdmStore::~CdmStore() = default;

const std::vector<std::string>& CdmStore::table_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& t : tables()) out.emplace_back(t.name);
    return out;
  }();
  return names;
}

std::string CdmStore::schema_ddl() {
  std::string out;
  for (const auto& t : tables()) out += create_table_sql(t) + ";\n\n";
  for (const char* ix : kIndexes) out += std::string(ix) + ";\n";
  return out;
}

std::vector<std::string> CdmStore::existing_tables() {
  sql::Statement st(*conn_, "SELECT name FROM sqlite_master WHERE type = 'table' ORDER BY name");
  std::vector<std::string> out;
  while (st.step()) out.push_back(st.column_text(0));
  return out;
}

std::size_t CdmStore::row_count(std::string_view table) {
  const auto& names = table_names();
  if (std::find(names.begin(), names.end(), table) == names.end()) {
    throw NotFoundError("unknown table '" + std::string(table) + "'");
  }
  sql::Statement st(*conn_, "SELECT count(*) FROM " + std::string(table));
  st.step();
  return static_cast<std::size_t>(st.column_int(0));
}

std::vector<std::string> CdmStore::init_schema() {
  std::vector<const TableDef*> missing;
  for (const auto& t : tables()) {
    sql::Statement info(*conn_, std::string("PRAGMA table_info(") + t.name + ")");
    std::vector<std::string> columns;
    while (info.step()) columns.push_back(info.column_text(1));
    if (columns.empty()) {
      missing.push_back(&t);
    } else if (columns != t.columns) {
      std::string have;
      for (const auto& c : columns) have += (have.empty() ? "" : ", ") + c;
      throw MigrationRequiredError(std::string("table '") + t.name +
                                   "' exists with incompatible columns (" + have + ")");
    }
  }
  sql::Transaction tx(*conn_);
  for (const TableDef* t : missing) conn_->exec(create_table_sql(*t));
  for (const char* ix : kIndexes) conn_->exec(ix);
  tx.commit();
  std::vector<std::string> created;
  for (const TableDef* t : missing) created.emplace_back(t->name);
  return created;
}

// --- corpora ----------------------------------------------------------------

CorpusId CdmStore::create_corpus(std::string_view name, std::string_view description,
                                 const AttributeMap& data) {
  sql::Statement st(*conn_, "INSERT INTO corpora (name, description, data) VALUES (?, ?, ?)");
  st.bind(1, name).bind(2, description).bind(3, serialize_map(data)).run();
  return conn_->last_insert_rowid();
}

std::optional<CorpusId> CdmStore::find_corpus(std::string_view name) {
  sql::Statement st(*conn_, "SELECT id FROM corpora WHERE name = ?");
  st.bind(1, name);
  if (!st.step()) return std::nullopt;
  return st.column_int(0);
}

Corpus CdmStore::load_corpus(CorpusId id) {
  sql::Statement st(*conn_, "SELECT name, description, data FROM corpora WHERE id = ?");
  st.bind(1, id);
  if (!st.step()) throw NotFoundError("corpus " + std::to_string(id) + " not found");
  Corpus c;
  c.id = id;
  c.name = st.column_text(0);
  c.description = st.column_text(1);
  c.metadata = deserialize_map(st.column_text(2));
  sql::Statement docs(*conn_, "SELECT document_id FROM corpora_documents WHERE corpus_id = ?");
  docs.bind(1, id);
  while (docs.step()) c.documents.insert(docs.column_int(0));
  return c;
}

void CdmStore::add_to_corpus(CorpusId corpus, DocumentId document) {
  sql::Statement st(*conn_,
                    "INSERT INTO corpora_documents (corpus_id, document_id) VALUES (?, ?) "
                    "ON CONFLICT DO NOTHING");
  st.bind(1, corpus).bind(2, document).run();
}

// --- annotation types --------------------------------------------------------

std::optional<std::int64_t> CdmStore::find_annotation_type(std::string_view name) {
  if (auto it = type_ids_.find(name); it != type_ids_.end()) return it->second;
  sql::Statement st(*conn_, "SELECT id FROM annotation_types WHERE name = ?");
  st.bind(1, name);
  if (!st.step()) return std::nullopt;
  const std::int64_t id = st.column_int(0);
  type_ids_.emplace(std::string(name), id);
  return id;
}

std::int64_t CdmStore::ensure_annotation_type(std::string_view name) {
  if (auto id = find_annotation_type(name)) return *id;
  sql::Statement st(*conn_, "INSERT INTO annotation_types (name) VALUES (?)");
  st.bind(1, name).run();
  const std::int64_t id = conn_->last_insert_rowid();
  // Not cached: the insert may still be rolled back by the caller.
  return id;
}

std::string CdmStore::type_name(std::int64_t type_id) {
  for (const auto& [name, id] : type_ids_) {
    if (id == type_id) return name;
  }
  sql::Statement st(*conn_, "SELECT name FROM annotation_types WHERE id = ?");
  st.bind(1, type_id);
  if (!st.step()) throw NotFoundError("annotation type " + std::to_string(type_id));
  std::string name = st.column_text(0);
  type_ids_.emplace(name, type_id);
  return name;
}

// --- documents ---------------------------------------------------------------

MarshalCounts CdmStore::marshal_document(Document& doc) {
  if (doc.persisted()) {
    MarshalCounts counts;
    const bool meta = doc.metadata_dirty();
    counts.annotation_rows = checkpoint(doc);
    counts.document_rows = meta ? 1 : 0;
    return counts;
  }

  std::vector<std::pair<AnnotationId, AnnotationId>> renames;
  DocumentId doc_id = 0;
  try {
    sql::Transaction tx(*conn_);
    sql::Statement ins(*conn_,
                       "INSERT INTO documents (name, source, size, data, content) "
                       "VALUES (?, ?, ?, ?, ?)");
    ins.bind(1, doc.name())
        .bind(2, doc.source())
        .bind(3, static_cast<std::int64_t>(doc.length()))
        .bind(4, serialize_map(doc.metadata()))
        .bind(5, doc.content())
        .run();
    doc_id = conn_->last_insert_rowid();

    sql::Statement ann_ins(*conn_,
                           "INSERT INTO annotations "
                           "(document_id, \"start\", \"end\", type_id, value, data) "
                           "VALUES (?, ?, ?, ?, ?, ?)");
    std::map<std::string, std::int64_t, std::less<>> local_types;
    RenameMap renamed;
    for (const Annotation* ann : doc.index().all()) {
      auto it = local_types.find(ann->type);
      if (it == local_types.end()) {
        it = local_types.emplace(ann->type, ensure_annotation_type(ann->type)).first;
      }
      ann_ins.reset();
      ann_ins.bind(1, doc_id)
          .bind(2, static_cast<std::int64_t>(ann->span.start()))
          .bind(3, static_cast<std::int64_t>(ann->span.end()))
          .bind(4, it->second)
          .bind(5, ann->value)
          .bind(6, annotation_data(*ann, &renamed))
          .run();
      renames.emplace_back(ann->id, static_cast<AnnotationId>(conn_->last_insert_rowid()));
      renamed.emplace(renames.back());
    }
    tx.commit();
  } catch (...) {
    type_ids_.clear();
    throw;
  }
  doc.assign_id(doc_id);
  doc.commit_sync(renames);
  return MarshalCounts{1, renames.size()};
}

std::size_t CdmStore::checkpoint(Document& doc, const CheckpointOptions& options) {
  if (!doc.persisted()) {
    throw ValidationError("document '" + doc.name() + "' has not been marshalled");
  }
  if (doc.dirty().empty() && doc.removed().empty() && !doc.metadata_dirty()) return 0;

  std::vector<std::pair<AnnotationId, AnnotationId>> renames;
  std::size_t written = 0;
  try {
    sql::Transaction tx(*conn_);
    written = write_changes(doc, options, renames);
    tx.commit();
  } catch (...) {
    // Rolled back: forget type ids that may have been created in it.
    type_ids_.clear();
    throw;
  }
  doc.commit_sync(renames);
  return written;
}

std::size_t CdmStore::write_changes(Document& doc, const CheckpointOptions& options,
                                    std::vector<std::pair<AnnotationId, AnnotationId>>& renames) {
  std::size_t writes = 0;
  auto count_write = [&] {
    ++writes;
    if (options.fail_after_writes && writes >= *options.fail_after_writes) {
      throw StoreError("checkpoint aborted after " + std::to_string(writes) + " writes");
    }
  };

  if (doc.metadata_dirty()) {
    sql::Statement st(*conn_, "UPDATE documents SET data = ?, source = ? WHERE id = ?");
    st.bind(1, serialize_map(doc.metadata())).bind(2, doc.source()).bind(3, doc.id()).run();
    if (conn_->changes() != 1) {
      throw ConflictError("document " + std::to_string(doc.id()) + " no longer in store");
    }
  }

  const std::string match_old =
      " WHERE id = ? AND document_id = ? AND \"start\" = ? AND \"end\" = ? AND type_id = ? "
      "AND value = ? AND data = ?";
  auto bind_old = [&](sql::Statement& st, int first, const Annotation& old) {
    const auto old_type = find_annotation_type(old.type);
    st.bind(first, as_db_id(old.id))
        .bind(first + 1, doc.id())
        .bind(first + 2, static_cast<std::int64_t>(old.span.start()))
        .bind(first + 3, static_cast<std::int64_t>(old.span.end()))
        .bind(first + 4, old_type.value_or(-1))
        .bind(first + 5, old.value)
        .bind(first + 6, annotation_data(old));
  };

  sql::Statement refs(*conn_,
                      "SELECT instance_id FROM instances_content "
                      "WHERE content_kind = 'annotation' AND content_id = ? LIMIT 1");
  sql::Statement del(*conn_, "DELETE FROM annotations" + match_old);
  for (AnnotationId id : doc.removed()) {
    const Annotation* old = doc.baseline(id);
    if (old == nullptr) continue;
    refs.reset();
    refs.bind(1, as_db_id(id));
    if (refs.step()) {
      throw ForeignKeyError("annotation " + std::to_string(id) + " is referenced by instance " +
                            std::to_string(refs.column_int(0)));
    }
    del.reset();
    bind_old(del, 1, *old);
    del.run();
    if (conn_->changes() != 1) {
      throw ConflictError("annotation " + std::to_string(id) + " changed in the store");
    }
    count_write();
  }

  sql::Statement ins(*conn_,
                     "INSERT INTO annotations (document_id, \"start\", \"end\", type_id, value, "
                     "data) VALUES (?, ?, ?, ?, ?, ?)");
  sql::Statement upd(*conn_,
                     "UPDATE annotations SET \"start\" = ?, \"end\" = ?, type_id = ?, value = ?, "
                     "data = ?" + match_old);
  // Inserts first, so updates can refer to the new rows' ids.
  std::vector<AnnotationId> order;
  for (AnnotationId id : doc.dirty()) {
    if (doc.baseline(id) == nullptr) order.push_back(id);
  }
  for (AnnotationId id : doc.dirty()) {
    if (doc.baseline(id) != nullptr) order.push_back(id);
  }
  RenameMap renamed;
  for (AnnotationId id : order) {
    const Annotation& ann = doc.get(id);
    const std::int64_t type_id = ensure_annotation_type(ann.type);
    const Annotation* old = doc.baseline(id);
    if (old == nullptr) {
      ins.reset();
      ins.bind(1, doc.id())
          .bind(2, static_cast<std::int64_t>(ann.span.start()))
          .bind(3, static_cast<std::int64_t>(ann.span.end()))
          .bind(4, type_id)
          .bind(5, ann.value)
          .bind(6, annotation_data(ann, &renamed))
          .run();
      renames.emplace_back(id, static_cast<AnnotationId>(conn_->last_insert_rowid()));
      renamed.emplace(renames.back());
    } else {
      upd.reset();
      upd.bind(1, static_cast<std::int64_t>(ann.span.start()))
          .bind(2, static_cast<std::int64_t>(ann.span.end()))
          .bind(3, type_id)
          .bind(4, ann.value)
          .bind(5, annotation_data(ann, &renamed));
      bind_old(upd, 6, *old);
      upd.run();
      if (conn_->changes() != 1) {
        throw ConflictError("annotation " + std::to_string(id) + " changed in the store");
      }
    }
    count_write();
  }
  return writes;
}

Document CdmStore::unmarshal_document(DocumentId id) {
  sql::Statement st(*conn_, "SELECT name, source, data, content FROM documents WHERE id = ?");
  st.bind(1, id);
  if (!st.step()) throw NotFoundError("document " + std::to_string(id) + " not found");
  Document doc(st.column_text(0), st.column_text(3), deserialize_map(st.column_text(2)));
  doc.set_source(st.column_text(1));
  doc.assign_id(id);

  sql::Statement anns(*conn_,
                      "SELECT a.id, a.\"start\", a.\"end\", t.name, a.value, a.data "
                      "FROM annotations a JOIN annotation_types t ON t.id = a.type_id "
                      "WHERE a.document_id = ? ORDER BY a.id");
  anns.bind(1, id);
  while (anns.step()) {
    Annotation ann;
    ann.id = static_cast<AnnotationId>(anns.column_int(0));
    ann.doc_id = id;
    ann.span = Interval(static_cast<Offset>(anns.column_int(1)),
                        static_cast<Offset>(anns.column_int(2)));
    ann.type = anns.column_text(3);
    ann.value = anns.column_text(4);
    split_annotation_data(anns.column_text(5), ann);
    doc.restore_annotation(std::move(ann));
  }
  return doc;
}

std::optional<DocumentId> CdmStore::find_document(std::string_view name) {
  sql::Statement st(*conn_, "SELECT id FROM documents WHERE name = ?");
  st.bind(1, name);
  if (!st.step()) return std::nullopt;
  return st.column_int(0);
}

std::vector<DocumentSummary> CdmStore::list_documents() {
  sql::Statement st(*conn_, "SELECT id, name, size FROM documents ORDER BY id");
  std::vector<DocumentSummary> out;
  while (st.step()) {
    out.push_back({st.column_int(0), st.column_text(1), static_cast<std::size_t>(st.column_int(2))});
  }
  return out;
}

std::vector<AnnotationRef> CdmStore::query_by_value(std::string_view type, std::string_view value) {
  const auto type_id = find_annotation_type(type);
  if (!type_id) return {};
  sql::Statement st(*conn_,
                    "SELECT id, document_id, \"start\", \"end\" FROM annotations "
                    "WHERE type_id = ? AND value = ? ORDER BY document_id, \"start\", \"end\", id");
  st.bind(1, *type_id).bind(2, value);
  std::vector<AnnotationRef> out;
  while (st.step()) {
    out.push_back({static_cast<AnnotationId>(st.column_int(0)), st.column_int(1),
                   Interval(static_cast<Offset>(st.column_int(2)),
                            static_cast<Offset>(st.column_int(3)))});
  }
  return out;
}

// --- instances ---------------------------------------------------------------

namespace {

bool row_exists(sql::Connection& conn, const char* table, std::int64_t id) {
  sql::Statement st(conn, std::string("SELECT 1 FROM ") + table + " WHERE id = ?");
  st.bind(1, id);
  return st.step();
}

}  // namespace

InstanceId CdmStore::create_instance(CorpusId corpus, InstanceKind kind,
                                     std::span<const std::int64_t> content_ids,
                                     const AttributeMap& data) {
  const std::size_t n = content_ids.size();
  switch (kind) {
    case InstanceKind::kDocument:
      if (n != 1) throw ValidationError("document instance needs exactly one document id");
      break;
    case InstanceKind::kAnnotationPair:
      if (n != 2) {
        throw ValidationError("annotation_pair instance needs exactly two annotation ids, got " +
                              std::to_string(n));
      }
      break;
    case InstanceKind::kDocumentSet:
      if (n == 0) throw ValidationError("document_set instance needs at least one document id");
      break;
  }
  if (!row_exists(*conn_, "corpora", corpus)) {
    throw ForeignKeyError("corpus " + std::to_string(corpus) + " does not exist");
  }
  const bool annotations = kind == InstanceKind::kAnnotationPair;
  const char* table = annotations ? "annotations" : "documents";
  for (std::int64_t id : content_ids) {
    if (!row_exists(*conn_, table, id)) {
      throw ForeignKeyError(std::string(annotations ? "annotation " : "document ") +
                            std::to_string(id) + " does not exist");
    }
  }

  sql::Transaction tx(*conn_);
  sql::Statement ins(*conn_, "INSERT INTO instances (corpus_id, kind, data) VALUES (?, ?, ?)");
  ins.bind(1, corpus).bind(2, instance_kind_name(kind)).bind(3, serialize_map(data)).run();
  const InstanceId id = conn_->last_insert_rowid();
  sql::Statement content(*conn_,
                         "INSERT INTO instances_content (instance_id, content_kind, content_id) "
                         "VALUES (?, ?, ?)");
  for (std::int64_t ref : content_ids) {
    content.reset();
    content.bind(1, id).bind(2, annotations ? "annotation" : "document").bind(3, ref).run();
  }
  tx.commit();
  return id;
}

InstanceKind CdmStore::instance_kind(InstanceId id) {
  sql::Statement st(*conn_, "SELECT kind FROM instances WHERE id = ?");
  st.bind(1, id);
  if (!st.step()) throw NotFoundError("instance " + std::to_string(id) + " not found");
  return parse_instance_kind(st.column_text(0));
}

std::vector<std::int64_t> CdmStore::instance_content(InstanceId id) {
  sql::Statement st(*conn_,
                    "SELECT content_id FROM instances_content WHERE instance_id = ? ORDER BY rowid");
  st.bind(1, id);
  std::vector<std::int64_t> out;
  while (st.step()) out.push_back(st.column_int(0));
  return out;
}

InstanceSetId CdmStore::create_instance_set(CorpusId corpus, std::string_view name,
                                            std::string_view purpose,
                                            std::span<const InstanceId> instances,
                                            const AttributeMap& data) {
  if (!row_exists(*conn_, "corpora", corpus)) {
    throw ForeignKeyError("corpus " + std::to_string(corpus) + " does not exist");
  }
  std::set<InstanceId> unique;
  sql::Statement owner(*conn_, "SELECT corpus_id FROM instances WHERE id = ?");
  for (InstanceId inst : instances) {
    owner.reset();
    owner.bind(1, inst);
    if (!owner.step()) {
      throw ForeignKeyError("instance " + std::to_string(inst) + " does not exist");
    }
    if (owner.column_int(0) != corpus) {
      throw ValidationError("instance " + std::to_string(inst) + " belongs to another corpus");
    }
    unique.insert(inst);
  }

  sql::Transaction tx(*conn_);
  sql::Statement ins(*conn_,
                     "INSERT INTO instance_sets (corpus_id, name, purpose, data) VALUES (?, ?, ?, ?)");
  ins.bind(1, corpus).bind(2, name).bind(3, purpose).bind(4, serialize_map(data)).run();
  const InstanceSetId id = conn_->last_insert_rowid();
  sql::Statement member(*conn_,
                        "INSERT INTO instance_set_members (instance_set_id, instance_id) "
                        "VALUES (?, ?)");
  for (InstanceId inst : unique) {
    member.reset();
    member.bind(1, id).bind(2, inst).run();
  }
  tx.commit();
  return id;
}

std::optional<InstanceSetId> CdmStore::find_instance_set(CorpusId corpus, std::string_view name) {
  sql::Statement st(*conn_, "SELECT id FROM instance_sets WHERE corpus_id = ? AND name = ?");
  st.bind(1, corpus).bind(2, name);
  if (!st.step()) return std::nullopt;
  return st.column_int(0);
}

std::vector<InstanceId> CdmStore::instance_set_members(InstanceSetId id) {
  sql::Statement st(*conn_,
                    "SELECT instance_id FROM instance_set_members WHERE instance_set_id = ? "
                    "ORDER BY instance_id");
  st.bind(1, id);
  std::vector<InstanceId> out;
  while (st.step()) out.push_back(st.column_int(0));
  return out;
}

void CdmStore::set_groundtruth(InstanceId instance, std::string_view task,
                               std::string_view label, const AttributeMap& data) {
  if (!row_exists(*conn_, "instances", instance)) {
    throw ForeignKeyError("instance " + std::to_string(instance) + " does not exist");
  }
  sql::Statement st(*conn_,
                    "INSERT INTO groundtruth (instance_id, task, label, data) VALUES (?, ?, ?, ?) "
                    "ON CONFLICT (instance_id, task) DO UPDATE SET label = excluded.label, "
                    "data = excluded.data");
  st.bind(1, instance).bind(2, task).bind(3, label).bind(4, serialize_map(data)).run();
}

std::optional<std::string> CdmStore::groundtruth(InstanceId instance, std::string_view task) {
  sql::Statement st(*conn_, "SELECT label FROM groundtruth WHERE instance_id = ? AND task = ?");
  st.bind(1, instance).bind(2, task);
  if (!st.step()) return std::nullopt;
  return st.column_text(0);
}

std::vector<std::string> CdmStore::orphan_report() {
  static const std::pair<const char*, const char*> checks[] = {
      {"corpora_documents",
       "SELECT count(*) FROM corpora_documents cd WHERE NOT EXISTS "
       "(SELECT 1 FROM corpora c WHERE c.id = cd.corpus_id) OR NOT EXISTS "
       "(SELECT 1 FROM documents d WHERE d.id = cd.document_id)"},
      {"instances_content",
       "SELECT count(*) FROM instances_content ic WHERE NOT EXISTS "
       "(SELECT 1 FROM instances i WHERE i.id = ic.instance_id) OR "
       "(ic.content_kind = 'document' AND NOT EXISTS "
       "(SELECT 1 FROM documents d WHERE d.id = ic.content_id)) OR "
       "(ic.content_kind = 'annotation' AND NOT EXISTS "
       "(SELECT 1 FROM annotations a WHERE a.id = ic.content_id))"},
      {"instance_set_members",
       "SELECT count(*) FROM instance_set_members m WHERE NOT EXISTS "
       "(SELECT 1 FROM instance_sets s WHERE s.id = m.instance_set_id) OR NOT EXISTS "
       "(SELECT 1 FROM instances i WHERE i.id = m.instance_id)"},
      {"lg_sigsub",
       "SELECT count(*) FROM lg_sigsub l WHERE NOT EXISTS "
       "(SELECT 1 FROM graphs g WHERE g.id = l.graph_id) OR NOT EXISTS "
       "(SELECT 1 FROM sig_subgraph s WHERE s.id = l.sig_subgraph_id)"},
      {"annotations",
       "SELECT count(*) FROM annotations a WHERE NOT EXISTS "
       "(SELECT 1 FROM documents d WHERE d.id = a.document_id)"},
  };
  std::vector<std::string> out;
  for (const auto& [table, query] : checks) {
    sql::Statement st(*conn_, query);
    st.step();
    if (const auto n = st.column_int(0); n > 0) {
      out.push_back(std::string(table) + ": " + std::to_string(n) + " orphan rows");
    }
  }
  return out;
}

}  // namespace standoff
