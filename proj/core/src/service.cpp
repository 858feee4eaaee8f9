#include "toolseek/service.hpp"

#include <fstream>
#include <stdexcept>

#include "httplib.h"

namespace toolseek {

using nlohmann::json;

namespace {

[[noreturn]] void bad_config(const std::string& message, const std::string& field) {
  throw Error(ErrorCode::ValidationFailed, "config: " + message, field);
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::size_t positive_size(const json& v, const std::string& key) {
  if (!v.is_number_integer() || v.get<long long>() < 1) bad_config(key + " must be a positive integer", key);
  return v.get<std::size_t>();
}

}  // namespace

ApiConfig parse_api_config(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) bad_config("top level must be an object", "");
  ApiConfig c;
  std::optional<std::string> user_agent;
  bool have_store = false;
  bool have_terminology = false;
  for (const auto& [key, v] : doc.items()) {
    if (key == "host") {
      if (!v.is_string()) bad_config("host must be a string", key);
      c.host = v.get<std::string>();
    } else if (key == "port") {
      if (!v.is_number_integer() || v.get<int>() < 0 || v.get<int>() > 65535) bad_config("bad port", key);
      c.port = v.get<int>();
    } else if (key == "rank_weights") {
      c.rank_weights = weights_from_json(v);
    } else if (key == "linkcheck") {
      if (!v.is_object()) bad_config("linkcheck must be an object", key);
      json policy = v;
      if (policy.contains("stub")) {
        c.linkcheck_stub = resolve(base_dir, policy["stub"].get<std::string>());
        policy.erase("stub");
      }
      if (policy.contains("interval_s")) {
        c.linkcheck_interval = std::chrono::seconds(policy["interval_s"].get<long>());
        policy.erase("interval_s");
      }
      c.linkcheck = policy_from_json(policy);
    } else if (key == "store_path") {
      c.store_path = resolve(base_dir, v.get<std::string>());
      have_store = true;
    } else if (key == "terminology_path") {
      c.terminology_path = resolve(base_dir, v.get<std::string>());
      have_terminology = true;
    } else if (key == "default_per_page") {
      c.default_per_page = positive_size(v, key);
    } else if (key == "max_per_page") {
      c.max_per_page = positive_size(v, key);
    } else if (key == "max_upload_bytes") {
      c.max_upload_bytes = positive_size(v, key);
    } else if (key == "user_agent") {
      user_agent = v.get<std::string>();
    } else if (key == "minting_endpoint") {
      c.minting_endpoint = v.get<std::string>();
    } else {
      bad_config("unknown key '" + key + "'", key);
    }
  }
  if (user_agent) c.linkcheck.user_agent = *user_agent;
  if (!have_store) bad_config("store_path is required", "store_path");
  if (!have_terminology) bad_config("terminology_path is required", "terminology_path");
  if (!std::filesystem::is_directory(c.store_path)) bad_config("store_path does not exist", "store_path");
  if (!std::filesystem::is_regular_file(c.terminology_path)) {
    bad_config("terminology_path does not exist", "terminology_path");
  }
  if (c.linkcheck_stub && !std::filesystem::is_regular_file(*c.linkcheck_stub)) {
    bad_config("linkcheck.stub does not exist", "linkcheck.stub");
  }
  if (c.max_per_page > kMaxPerPage) bad_config("max_per_page may not exceed 100", "max_per_page");
  if (c.default_per_page > c.max_per_page) bad_config("default_per_page exceeds max_per_page", "default_per_page");
  return c;
}

ApiConfig load_api_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::ValidationFailed, "cannot read config " + file.string(), file.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedDocument, "config " + file.string() + ": " + e.what(), file.string());
  }
  return parse_api_config(doc, file.parent_path());
}

const std::vector<ErrorMapping>& error_table() {
  static const std::vector<ErrorMapping> table = {
      {ErrorCode::MalformedDocument, 400, "malformed_document"},
      {ErrorCode::InvariantViolation, 500, "invariant_violation"},
      {ErrorCode::UnknownCategory, 400, "unknown_category"},
      {ErrorCode::MissingField, 400, "missing_field"},
      {ErrorCode::UnknownField, 400, "unknown_field"},
      {ErrorCode::DuplicateName, 409, "duplicate_name"},
      {ErrorCode::InvalidUrl, 400, "invalid_url"},
      {ErrorCode::InvalidEmail, 400, "invalid_email"},
      {ErrorCode::UnknownTool, 404, "unknown_tool"},
      {ErrorCode::ImmutableField, 400, "immutable_field"},
      {ErrorCode::ValidationFailed, 400, "validation_failed"},
      {ErrorCode::Forbidden, 403, "forbidden"},
      {ErrorCode::DuplicateVersion, 409, "duplicate_version"},
      {ErrorCode::MintingFailed, 502, "minting_failed"},
      {ErrorCode::StaleEvent, 409, "stale_event"},
      {ErrorCode::QueryTooLong, 400, "query_too_long"},
      {ErrorCode::SyntaxError, 400, "query_syntax"},
      {ErrorCode::PureNegation, 400, "pure_negation"},
      {ErrorCode::DepthExceeded, 400, "query_depth"},
      {ErrorCode::EmptyPlan, 400, "empty_plan"},
      {ErrorCode::BadFacetValue, 400, "bad_facet_value"},
      {ErrorCode::InvalidWeights, 400, "invalid_weights"},
      {ErrorCode::PageOutOfRange, 400, "page_out_of_range"},
      {ErrorCode::ExhaustedSpace, 507, "accession_space_exhausted"},
      {ErrorCode::InvalidVersionLabel, 400, "invalid_version_label"},
      {ErrorCode::UnknownUser, 404, "unknown_user"},
      {ErrorCode::RatingOutOfRange, 400, "rating_out_of_range"},
      {ErrorCode::UnknownCollection, 404, "unknown_collection"},
      {ErrorCode::UnknownPublication, 404, "unknown_publication"},
      {ErrorCode::EmptyRoleSet, 400, "empty_role_set"},
      {ErrorCode::UnknownRole, 400, "unknown_role"},
      {ErrorCode::PayloadTooLarge, 413, "payload_too_large"},
      {ErrorCode::NoSnapshot, 503, "no_snapshot"},
      {ErrorCode::StorageFailure, 500, "storage_failure"},
  };
  return table;
}

const ErrorMapping& map_error(ErrorCode code) {
  for (const auto& m : error_table())
    if (m.code == code) return m;
  static const ErrorMapping fallback{ErrorCode::StorageFailure, 500, "internal"};
  return fallback;
}

nlohmann::json error_body(const Error& error) {
  const auto& m = map_error(error.code());
  json body = {{"status", m.status}, {"code", m.name}, {"message", error.what()}};
  if (!error.field().empty()) body["field"] = error.field();
  if (error.position()) body["position"] = *error.position();
  return body;
}

std::string wire(const nlohmann::json& body) { return body.dump() + "\n"; }

namespace {

std::size_t parse_count(const std::string& text, const std::string& field) {
  std::size_t used = 0;
  long long v = -1;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
  }
  if (used != text.size() || v < 1) {
    throw Error(ErrorCode::PageOutOfRange, field + " must be a positive integer", field);
  }
  return static_cast<std::size_t>(v);
}

bool parse_flag(const std::string& text, const std::string& field) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0" || text.empty()) return false;
  throw Error(ErrorCode::BadFacetValue, field + " must be true or false", field);
}

}  // namespace

SearchRequest search_request_from_params(const QueryParams& params, const ApiConfig& config) {
  static const std::map<std::string, FacetDimension> kFacetParams = {
      {"cat", FacetDimension::Category},
      {"os", FacetDimension::OperatingSystem},
      {"lang", FacetDimension::ProgrammingLanguage},
      {"iface", FacetDimension::Interface},
      {"tech", FacetDimension::Technology},
  };
  SearchRequest r;
  r.per_page = config.default_per_page;
  std::map<FacetDimension, std::set<std::string>> facets;
  for (const auto& [key, value] : params) {
    if (key == "q") {
      r.q = value;
    } else if (key == "page") {
      r.page = parse_count(value, key);
    } else if (key == "per_page") {
      r.per_page = parse_count(value, key);
      if (r.per_page > config.max_per_page) {
        throw Error(ErrorCode::PageOutOfRange, "per_page may not exceed " + std::to_string(config.max_per_page), key);
      }
    } else if (key == "include_obsolete") {
      r.include_obsolete = parse_flag(value, key);
    } else if (auto it = kFacetParams.find(key); it != kFacetParams.end()) {
      if (value.empty()) throw Error(ErrorCode::BadFacetValue, "empty " + key + " value", key);
      facets[it->second].insert(value);
    } else {
      throw Error(ErrorCode::BadFacetValue, "unknown search parameter '" + key + "'", key);
    }
  }
  for (auto& [dim, values] : facets) r.filters.add(dim, std::move(values));
  return r;
}

Caller caller_from_headers(const std::optional<std::string>& user, const std::optional<std::string>& role) {
  if (!user || user->empty()) throw Error(ErrorCode::MissingField, "X-User header is required", "X-User");
  Caller c{*user, Role::Member};
  if (role && !role->empty()) {
    auto parsed = parse_role(*role);
    if (!parsed) throw Error(ErrorCode::ValidationFailed, "unknown role '" + *role + "'", "X-Role");
    c.role = *parsed;
  }
  return c;
}

namespace {

using httplib::Request;
using httplib::Response;
using Handler = std::function<void(const Request&, Response&)>;

void send(Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(wire(body), "application/json; charset=utf-8");
}

void send_error(Response& res, const Error& e) { send(res, map_error(e.code()).status, error_body(e)); }

std::optional<std::string> header(const Request& req, const char* name) {
  if (!req.has_header(name)) return std::nullopt;
  return req.get_header_value(name);
}

Caller caller(const Request& req) { return caller_from_headers(header(req, "X-User"), header(req, "X-Role")); }

std::optional<Caller> optional_caller(const Request& req) {
  if (!header(req, "X-User")) return std::nullopt;
  return caller(req);
}

Accession accession_arg(const Request& req, std::size_t index = 1) {
  const auto text = req.matches[index].str();
  auto acc = Accession::try_parse(text);
  if (!acc) throw Error(ErrorCode::UnknownTool, "unknown tool " + text, text);
  return *acc;
}

json body_object(const Request& req) {
  if (req.body.empty()) return json::object();
  json doc;
  try {
    doc = json::parse(req.body);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedDocument, std::string("request body is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::MalformedDocument, "request body must be a JSON object");
  return doc;
}

std::string string_field(const json& doc, const char* key) {
  if (!doc.contains(key) || doc[key].is_null()) return {};
  if (!doc[key].is_string()) throw Error(ErrorCode::ValidationFailed, std::string(key) + " must be a string", key);
  return doc[key].get<std::string>();
}

void require_admin(const Caller& c) {
  if (c.role != Role::Admin) throw Error(ErrorCode::Forbidden, "admin role required", "X-Role");
}

json category_json(const CategoryNode& node) {
  json doc = {{"category_id", node.category_id},
              {"label", node.label},
              {"level", node.level},
              {"omics_field", std::string(to_string(node.omics_field))}};
  doc["parent_id"] = node.parent_id ? json(*node.parent_id) : json(nullptr);
  return doc;
}

json rating_json(const RatingAggregate& agg, const RatingSummary& summary) {
  json doc = {{"count", agg.count}, {"community_score", community_score(summary)}};
  doc["mean"] = agg.mean ? json(*agg.mean) : json(nullptr);
  return doc;
}

}  // namespace

Service::Service(Catalog& catalog, ApiConfig config, std::shared_ptr<Transport> linkcheck_transport)
    : catalog_(catalog), config_(std::move(config)), server_(std::make_unique<httplib::Server>()) {
  if (!linkcheck_transport) {
    if (config_.linkcheck_stub) {
      std::ifstream in(*config_.linkcheck_stub);
      linkcheck_transport = MapTransport::from_json(json::parse(in));
    } else {
      linkcheck_transport = std::make_shared<HttpTransport>();
    }
  }
  checker_ = std::make_unique<LinkChecker>(catalog_.registry(), std::move(linkcheck_transport), config_.linkcheck,
                                           catalog_.clock());
  install_routes();
}

Service::~Service() { stop(); }

void Service::install_routes() {
  auto& srv = *server_;
  srv.set_payload_max_length(config_.max_upload_bytes + 64 * 1024);

  auto guarded = [](Handler h) {
    return [h = std::move(h)](const Request& req, Response& res) {
      try {
        h(req, res);
      } catch (const Error& e) {
        send_error(res, e);
      } catch (const json::exception& e) {
        send_error(res, Error(ErrorCode::MalformedDocument, e.what()));
      } catch (const std::exception& e) {
        send(res, 500, {{"status", 500}, {"code", "internal"}, {"message", e.what()}});
      }
    };
  };
  // Mutations report the generation that already reflects them.
  auto mutated = [this](Response& res, int status, const json& body) {
    res.set_header(std::string(kGenerationHeader), std::to_string(catalog_.generation()));
    send(res, status, body);
  };

  srv.set_error_handler([](const Request&, Response& res) {
    if (!res.body.empty()) return;
    if (res.status == 413) {
      send_error(res, Error(ErrorCode::PayloadTooLarge, "request body exceeds the configured limit"));
    } else if (res.status == 404) {
      send(res, 404, {{"status", 404}, {"code", "not_found"}, {"message", "no such route"}});
    }
  });

  srv.Get("/api/v1/healthz", guarded([this](const Request&, Response& res) {
            send(res, 200, {{"status", "ok"}, {"generation", catalog_.generation()}});
          }));

  srv.Get("/api/v1/search", guarded([this](const Request& req, Response& res) {
            const auto start = std::chrono::steady_clock::now();
            QueryParams params(req.params.begin(), req.params.end());
            const auto request = search_request_from_params(params, config_);
            const auto snap = catalog_.snapshot();
            const auto response =
                execute_search(catalog_.plan(request, *snap), *snap, catalog_.weights(), request.page, request.per_page);
            const auto elapsed =
                std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - start);
            res.set_header(std::string(kGenerationHeader), std::to_string(response.generation));
            res.set_header(std::string(kElapsedHeader), std::to_string(elapsed.count()));
            send(res, 200, response_to_json(response));
          }));

  srv.Get(R"(/api/v1/tools/([^/]+))", guarded([this](const Request& req, Response& res) {
            const auto acc = accession_arg(req);
            const auto who = optional_caller(req);
            const bool editor = who && who->role != Role::Member;
            auto doc = card_to_json(catalog_.registry().get_tool(acc, editor));
            doc["rating"] = rating_json(catalog_.community().aggregate_rating(acc),
                                        catalog_.community().rating_summary(acc));
            send(res, 200, doc);
          }));

  srv.Get(R"(/api/v1/tools/([^/]+)/related)", guarded([this](const Request& req, Response& res) {
            const auto acc = accession_arg(req);
            std::size_t k = 5;
            if (req.has_param("k")) {
              k = parse_count(req.get_param_value("k"), "k");
              if (k > config_.max_per_page) throw Error(ErrorCode::PageOutOfRange, "k is too large", "k");
            }
            send(res, 200, {{"accession", acc.str()}, {"related", related_to_json(catalog_.related(acc, k))}});
          }));

  srv.Get(R"(/api/v1/tools/([^/]+)/reviews)", guarded([this](const Request& req, Response& res) {
            const auto acc = accession_arg(req);
            auto& community = catalog_.community();
            json reviews = json::array();
            for (const auto& r : community.reviews(acc)) reviews.push_back(review_to_json(r));
            send(res, 200,
                 {{"accession", acc.str()},
                  {"rating", rating_json(community.aggregate_rating(acc), community.rating_summary(acc))},
                  {"reviews", reviews}});
          }));

  srv.Get(R"(/api/v1/tools/([^/]+)/comments)", guarded([this](const Request& req, Response& res) {
            const auto acc = accession_arg(req);
            catalog_.registry().get_tool(acc, true);
            json comments = json::array();
            for (const auto& c : catalog_.community().comments(acc)) comments.push_back(comment_to_json(c));
            send(res, 200, {{"accession", acc.str()}, {"comments", comments}});
          }));

  srv.Get("/api/v1/categories", guarded([this](const Request&, Response& res) {
            json out = json::array();
            for (const auto& [id, node] : catalog_.terminology().categories()) out.push_back(category_json(node));
            send(res, 200, {{"categories", out}});
          }));

  srv.Get(R"(/api/v1/categories/([^/]+))", guarded([this](const Request& req, Response& res) {
            const auto id = req.matches[1].str();
            const auto* node = catalog_.terminology().find_category(id);
            if (!node) throw Error(ErrorCode::UnknownCategory, "unknown category '" + id + "'", id);
            auto doc = category_json(*node);
            doc["children"] = catalog_.terminology().children(id);
            doc["descendants"] = catalog_.terminology().descendants(id);
            send(res, 200, doc);
          }));

  srv.Post("/api/v1/tools", guarded([this, mutated](const Request& req, Response& res) {
             const auto body = body_object(req);
             const auto card = catalog_.registry().submit_tool(
                 string_field(body, "name"), string_field(body, "description"), string_field(body, "homepage_url"),
                 string_field(body, "webmaster_email"));
             mutated(res, 201, card_to_json(card));
           }));

  srv.Patch(R"(/api/v1/tools/([^/]+))", guarded([this, mutated](const Request& req, Response& res) {
              const auto acc = accession_arg(req);
              const auto who = caller(req);
              const auto body = body_object(req);
              if (body.empty()) throw Error(ErrorCode::MissingField, "edit body names no fields");
              for (const auto& [field, value] : body.items()) {
                if (is_immutable_field(field)) {
                  throw Error(ErrorCode::ImmutableField, "field '" + field + "' cannot be edited", field);
                }
              }
              ToolCard card;
              for (const auto& [field, value] : body.items()) {
                card = catalog_.registry().apply_edit(acc, field, value, Editor{who.user_id, who.role});
              }
              mutated(res, 200, card_to_json(card));
            }));

  srv.Post(R"(/api/v1/tools/([^/]+)/reviews)", guarded([this, mutated](const Request& req, Response& res) {
             const auto acc = accession_arg(req);
             const auto who = caller(req);
             const auto body = body_object(req);
             if (!body.contains("rating") || !body["rating"].is_number_integer()) {
               throw Error(ErrorCode::RatingOutOfRange, "rating must be an integer between 1 and 5", "rating");
             }
             const auto review =
                 catalog_.community().add_review(who.user_id, acc, body["rating"].get<int>(), string_field(body, "text"));
             mutated(res, 201, review_to_json(review));
           }));

  srv.Post(R"(/api/v1/tools/([^/]+)/versions)", guarded([this, mutated](const Request& req, Response& res) {
             const auto acc = accession_arg(req);
             json meta;
             std::string payload;
             if (req.is_multipart_form_data()) {
               if (!req.has_file("metadata")) throw Error(ErrorCode::MissingField, "missing metadata part", "metadata");
               if (!req.has_file("archive")) throw Error(ErrorCode::MissingField, "missing archive part", "archive");
               meta = json::parse(req.get_file_value("metadata").content);
               payload = req.get_file_value("archive").content;
             } else {
               meta = body_object(req);
               payload = string_field(meta, "payload");
             }
             if (payload.size() > config_.max_upload_bytes) {
               throw Error(ErrorCode::PayloadTooLarge,
                           "archive exceeds " + std::to_string(config_.max_upload_bytes) + " bytes", "archive");
             }
             std::optional<std::size_t> pub;
             if (meta.contains("linked_publication") && !meta["linked_publication"].is_null()) {
               if (!meta["linked_publication"].is_number_unsigned()) {
                 throw Error(ErrorCode::ValidationFailed, "linked_publication must be an index", "linked_publication");
               }
               pub = meta["linked_publication"].get<std::size_t>();
             }
             const auto version = catalog_.registry().add_version(
                 acc, string_field(meta, "version_label"), string_field(meta, "operating_system"),
                 string_field(meta, "architecture"), pub, payload);
             mutated(res, 201, version_to_json(version));
           }));

  srv.Post(R"(/api/v1/tools/([^/]+)/comments)", guarded([this, mutated](const Request& req, Response& res) {
             const auto acc = accession_arg(req);
             const auto who = caller(req);
             const auto body = body_object(req);
             mutated(res, 201, comment_to_json(catalog_.community().add_comment(who.user_id, acc, string_field(body, "text"))));
           }));

  srv.Post(R"(/api/v1/tools/([^/]+)/publications/(\d+)/credit)",
           guarded([this, mutated](const Request& req, Response& res) {
             const auto acc = accession_arg(req);
             const auto index = std::stoul(req.matches[2].str());
             const auto who = caller(req);
             const auto body = body_object(req);
             if (!body.contains("roles") || !body["roles"].is_array()) {
               throw Error(ErrorCode::EmptyRoleSet, "roles must be a non-empty array", "roles");
             }
             const auto pub = catalog_.community().assign_credit(who.user_id, acc, index,
                                                                 body["roles"].get<std::vector<std::string>>());
             mutated(res, 200, publication_to_json(pub));
           }));

  srv.Post("/api/v1/users", guarded([this, mutated](const Request& req, Response& res) {
             const auto body = body_object(req);
             if (string_field(body, "user_id").empty()) {
               throw Error(ErrorCode::MissingField, "missing field 'user_id'", "user_id");
             }
             auto user = user_from_json(body);
             // Elevated roles can only be granted by an admin.
             const auto who = optional_caller(req);
             if (!who || who->role != Role::Admin) user.roles = {Role::Member};
             mutated(res, 201, user_to_json(catalog_.community().register_user(std::move(user))));
           }));

  srv.Get(R"(/api/v1/users/([^/]+))", guarded([this](const Request& req, Response& res) {
            const auto id = req.matches[1].str();
            auto user = catalog_.community().find_user(id);
            if (!user) throw Error(ErrorCode::UnknownUser, "unknown user '" + id + "'", id);
            send(res, 200, user_to_json(*user));
          }));

  srv.Get(R"(/api/v1/users/([^/]+)/collections)", guarded([this](const Request& req, Response& res) {
            const auto id = req.matches[1].str();
            if (!catalog_.community().find_user(id)) throw Error(ErrorCode::UnknownUser, "unknown user '" + id + "'", id);
            json out = json::array();
            for (const auto& c : catalog_.community().collections(id)) out.push_back(collection_to_json(c));
            send(res, 200, {{"user_id", id}, {"collections", out}});
          }));

  srv.Put(R"(/api/v1/users/([^/]+)/collections/([^/]+))", guarded([this, mutated](const Request& req, Response& res) {
            const auto owner = req.matches[1].str();
            const auto name = req.matches[2].str();
            const auto who = caller(req);
            if (who.user_id != owner && who.role != Role::Admin) {
              throw Error(ErrorCode::Forbidden, "collections belong to their owner", "X-User");
            }
            const auto body = body_object(req);
            const auto action_text = string_field(body, "action");
            BookmarkAction action = BookmarkAction::Add;
            if (action_text == "remove") {
              action = BookmarkAction::Remove;
            } else if (!action_text.empty() && action_text != "add") {
              throw Error(ErrorCode::ValidationFailed, "action must be add or remove", "action");
            }
            const auto acc_text = string_field(body, "accession");
            const auto acc = Accession::try_parse(acc_text);
            if (!acc) throw Error(ErrorCode::UnknownTool, "unknown tool '" + acc_text + "'", "accession");
            mutated(res, 200, collection_to_json(catalog_.community().manage_bookmark(owner, *acc, name, action)));
          }));

  srv.Delete(R"(/api/v1/users/([^/]+)/collections/([^/]+))",
             guarded([this, mutated](const Request& req, Response& res) {
               const auto owner = req.matches[1].str();
               const auto name = req.matches[2].str();
               const auto who = caller(req);
               if (who.user_id != owner && who.role != Role::Admin) {
                 throw Error(ErrorCode::Forbidden, "collections belong to their owner", "X-User");
               }
               catalog_.community().delete_collection(owner, name);
               mutated(res, 200, {{"user_id", owner}, {"deleted", name}});
             }));

  srv.Post("/api/v1/admin/reindex", guarded([this, mutated](const Request& req, Response& res) {
             require_admin(caller(req));
             const auto generation = catalog_.reindex();
             mutated(res, 200, {{"generation", generation}});
           }));

  srv.Post("/api/v1/admin/linkcheck", guarded([this, mutated](const Request& req, Response& res) {
             require_admin(caller(req));
             std::lock_guard lock(sweep_mutex_);
             mutated(res, 200, sweep_to_json(checker_->run_sweep()));
           }));
}

int Service::bind(int port) {
  if (port == 0) {
    const int bound = server_->bind_to_any_port(config_.host);
    if (bound < 0) throw std::runtime_error("cannot bind " + config_.host);
    return bound;
  }
  if (!server_->bind_to_port(config_.host, port)) {
    throw std::runtime_error("cannot bind " + config_.host + ":" + std::to_string(port));
  }
  return port;
}

void Service::schedule_sweeps() {
  if (config_.linkcheck_interval.count() <= 0 || sweep_thread_.joinable()) return;
  sweep_thread_ = std::thread([this] {
    std::unique_lock lock(stop_mutex_);
    while (!stop_cv_.wait_for(lock, config_.linkcheck_interval, [this] { return stopping_; })) {
      lock.unlock();
      {
        std::lock_guard sweep(sweep_mutex_);
        checker_->run_sweep();
      }
      lock.lock();
    }
  });
}

void Service::start() {
  schedule_sweeps();
  server_thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

bool Service::listen() {
  schedule_sweeps();
  bind(config_.port);
  return server_->listen_after_bind();
}

void Service::stop() {
  {
    std::lock_guard lock(stop_mutex_);
    stopping_ = true;
  }
  stop_cv_.notify_all();
  if (server_) server_->stop();
  if (server_thread_.joinable()) server_thread_.join();
  if (sweep_thread_.joinable()) sweep_thread_.join();
}

}  // namespace toolseek
