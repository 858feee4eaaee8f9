#include "toolseek/community.hpp"

#include <algorithm>

#include "json.hpp"

namespace toolseek {

using nlohmann::json;

json user_to_json(const User& u) {
  json roles = json::array();
  for (auto r : u.roles) roles.push_back(std::string(to_string(r)));
  json doc = {{"user_id", u.user_id}, {"display_name", u.display_name}, {"roles", roles},
              {"profile_links", u.profile_links}};
  doc["biography"] = u.biography ? json(*u.biography) : json(nullptr);
  doc["affiliation"] = u.affiliation ? json(*u.affiliation) : json(nullptr);
  return doc;
}

User user_from_json(const json& doc) {
  User u;
  u.user_id = doc.at("user_id").get<std::string>();
  u.display_name = doc.value("display_name", "");
  if (doc.contains("biography") && doc["biography"].is_string()) u.biography = doc["biography"].get<std::string>();
  if (doc.contains("affiliation") && doc["affiliation"].is_string()) {
    u.affiliation = doc["affiliation"].get<std::string>();
  }
  u.roles.clear();
  for (const auto& r : doc.value("roles", json::array())) {
    if (auto role = parse_role(r.get<std::string>())) u.roles.insert(*role);
  }
  u.profile_links = doc.value("profile_links", std::map<std::string, std::string>{});
  return u;
}

json review_to_json(const Review& r) {
  return {{"user_id", r.user_id}, {"accession", r.accession.str()}, {"rating", r.rating},
          {"text", r.text}, {"at", format_timestamp(r.at)}};
}

Review review_from_json(const json& doc) {
  return {doc.at("user_id").get<std::string>(), Accession::parse(doc.at("accession").get<std::string>()),
          doc.at("rating").get<int>(), doc.value("text", ""), parse_timestamp(doc.at("at").get<std::string>())};
}

json collection_to_json(const Collection& c) {
  json accs = json::array();
  for (const auto& a : c.accessions) accs.push_back(a.str());
  return {{"owner", c.owner}, {"name", c.name}, {"accessions", accs}, {"shared", c.shared}};
}

json comment_to_json(const Comment& c) {
  return {{"user_id", c.user_id}, {"accession", c.accession.str()}, {"at", format_timestamp(c.at)}, {"text", c.text}};
}

Collection collection_from_json(const json& doc) {
  Collection c;
  c.owner = doc.at("owner").get<std::string>();
  c.name = doc.at("name").get<std::string>();
  for (const auto& a : doc.at("accessions")) c.accessions.push_back(Accession::parse(a.get<std::string>()));
  c.shared = doc.value("shared", false);
  return c;
}

namespace {

std::string pair_key(std::string_view a, std::string_view b) { return std::string(a) + "|" + std::string(b); }

}  // namespace

Community::Community(Registry& registry, std::shared_ptr<DocumentStore> store, Clock clock)
    : registry_(registry), store_(std::move(store)), clock_(std::move(clock)) {
  for (const auto& [key, text] : store_->list("users")) {
    auto u = user_from_json(json::parse(text));
    users_.emplace(u.user_id, std::move(u));
  }
  for (const auto& [key, text] : store_->list("reviews")) {
    auto r = review_from_json(json::parse(text));
    reviews_[r.accession].insert_or_assign(r.user_id, std::move(r));
  }
  for (const auto& [key, text] : store_->list("collections")) {
    auto c = collection_from_json(json::parse(text));
    auto k = std::make_pair(c.owner, c.name);
    collections_.emplace(std::move(k), std::move(c));
  }
  for (const auto& line : store_->read_log("review_replacements")) {
    const auto doc = json::parse(line);
    ReviewReplacement r{doc.at("user_id").get<std::string>(), Accession::parse(doc.at("accession").get<std::string>()),
                        parse_timestamp(doc.at("at").get<std::string>()), doc.at("old_rating").get<int>(),
                        doc.at("new_rating").get<int>(), doc.value("old_text", ""), doc.value("new_text", "")};
    replacements_[r.accession].push_back(std::move(r));
  }
  for (const auto& line : store_->read_log("comments")) {
    const auto doc = json::parse(line);
    Comment c{doc.at("user_id").get<std::string>(), Accession::parse(doc.at("accession").get<std::string>()),
              parse_timestamp(doc.at("at").get<std::string>()), doc.value("text", "")};
    comments_[c.accession].push_back(std::move(c));
  }
}

void Community::set_rating_listener(RatingListener listener) {
  std::unique_lock lock(mutex_);
  rating_listener_ = std::move(listener);
}

void Community::require_user(std::string_view user_id) const {
  if (!users_.count(user_id)) {
    throw Error(ErrorCode::UnknownUser, "unknown user '" + std::string(user_id) + "'", std::string(user_id));
  }
}

void Community::require_tool(const Accession& accession) const {
  if (!registry_.find_tool(accession)) {
    throw Error(ErrorCode::UnknownTool, "unknown tool " + accession.str(), accession.str());
  }
}

User Community::register_user(User user) {
  if (user.user_id.empty()) throw Error(ErrorCode::MissingField, "missing field 'user_id'", "user_id");
  if (user.roles.empty()) user.roles.insert(Role::Member);
  std::unique_lock lock(mutex_);
  store_->put("users", user.user_id, user_to_json(user).dump(2) + "\n");
  users_.insert_or_assign(user.user_id, user);
  return user;
}

std::optional<User> Community::find_user(std::string_view user_id) const {
  std::shared_lock lock(mutex_);
  auto it = users_.find(user_id);
  if (it == users_.end()) return std::nullopt;
  return it->second;
}

Review Community::add_review(std::string_view user_id, const Accession& accession, int rating,
                             std::string_view text) {
  RatingListener listener;
  Review review;
  {
    std::unique_lock lock(mutex_);
    require_user(user_id);
    require_tool(accession);
    if (rating < 1 || rating > 5) {
      throw Error(ErrorCode::RatingOutOfRange, "rating must be between 1 and 5, got " + std::to_string(rating),
                  "rating");
    }
    review = Review{std::string(user_id), accession, rating, std::string(text), clock_()};
    auto& per_tool = reviews_[accession];
    if (auto prior = per_tool.find(review.user_id); prior != per_tool.end()) {
      ReviewReplacement r{review.user_id, accession, review.at, prior->second.rating, rating, prior->second.text,
                          review.text};
      store_->append_log("review_replacements",
                         json{{"user_id", r.user_id}, {"accession", accession.str()}, {"at", format_timestamp(r.at)},
                              {"old_rating", r.old_rating}, {"new_rating", r.new_rating},
                              {"old_text", r.old_text}, {"new_text", r.new_text}}
                             .dump());
      replacements_[accession].push_back(std::move(r));
    }
    store_->put("reviews", pair_key(accession.str(), user_id), review_to_json(review).dump(2) + "\n");
    per_tool.insert_or_assign(review.user_id, review);
    listener = rating_listener_;
  }
  if (listener) listener(accession);
  return review;
}

RatingSummary Community::rating_summary(const Accession& accession) const {
  std::shared_lock lock(mutex_);
  RatingSummary s;
  auto it = reviews_.find(accession);
  if (it == reviews_.end()) return s;
  for (const auto& [user, r] : it->second) {
    s.sum += r.rating;
    ++s.count;
  }
  return s;
}

RatingAggregate Community::aggregate_rating(const Accession& accession) const {
  require_tool(accession);
  const auto s = rating_summary(accession);
  RatingAggregate agg;
  agg.count = s.count;
  if (s.count > 0) agg.mean = static_cast<double>(s.sum) / static_cast<double>(s.count);
  return agg;
}

std::vector<Review> Community::reviews(const Accession& accession) const {
  std::shared_lock lock(mutex_);
  std::vector<Review> out;
  if (auto it = reviews_.find(accession); it != reviews_.end()) {
    for (const auto& [user, r] : it->second) out.push_back(r);
  }
  std::sort(out.begin(), out.end(), [](const Review& a, const Review& b) {
    return a.at != b.at ? a.at > b.at : a.user_id < b.user_id;
  });
  return out;
}

std::vector<ReviewReplacement> Community::review_history(const Accession& accession) const {
  std::shared_lock lock(mutex_);
  auto it = replacements_.find(accession);
  return it == replacements_.end() ? std::vector<ReviewReplacement>{} : it->second;
}

void Community::persist_collection(const Collection& c) {
  store_->put("collections", pair_key(c.owner, c.name), collection_to_json(c).dump(2) + "\n");
}

Collection Community::manage_bookmark(std::string_view user_id, const Accession& accession,
                                      std::string_view collection_name, BookmarkAction action) {
  std::unique_lock lock(mutex_);
  require_user(user_id);
  if (collection_name.empty()) throw Error(ErrorCode::MissingField, "missing collection name", "collection");
  const auto key = std::make_pair(std::string(user_id), std::string(collection_name));
  auto it = collections_.find(key);
  if (action == BookmarkAction::Add) {
    require_tool(accession);
    if (it == collections_.end()) {
      it = collections_.emplace(key, Collection{key.first, key.second, {}, false}).first;
    }
    auto& accs = it->second.accessions;
    if (std::find(accs.begin(), accs.end(), accession) == accs.end()) accs.push_back(accession);
  } else {
    if (it == collections_.end()) {
      throw Error(ErrorCode::UnknownCollection, "no collection '" + key.second + "' for user " + key.first,
                  key.second);
    }
    auto& accs = it->second.accessions;
    accs.erase(std::remove(accs.begin(), accs.end(), accession), accs.end());
  }
  persist_collection(it->second);
  return it->second;
}

void Community::delete_collection(std::string_view user_id, std::string_view collection_name) {
  std::unique_lock lock(mutex_);
  const auto key = std::make_pair(std::string(user_id), std::string(collection_name));
  auto it = collections_.find(key);
  if (it == collections_.end()) {
    throw Error(ErrorCode::UnknownCollection, "no collection '" + key.second + "'", key.second);
  }
  // Soft delete: an empty, unshared tombstone keeps the store append-friendly.
  collections_.erase(it);
  store_->append_log("collection_deletions", json{{"owner", key.first}, {"name", key.second}}.dump());
  store_->put("collections", pair_key(key.first, key.second),
              collection_to_json(Collection{key.first, key.second, {}, false}).dump(2) + "\n");
}

std::vector<Collection> Community::collections(std::string_view user_id) const {
  std::shared_lock lock(mutex_);
  std::vector<Collection> out;
  for (const auto& [key, c] : collections_)
    if (key.first == user_id) out.push_back(c);
  return out;
}

Publication Community::assign_credit(std::string_view user_id, const Accession& accession,
                                     std::size_t publication_index, const std::vector<std::string>& roles) {
  {
    std::shared_lock lock(mutex_);
    require_user(user_id);
  }
  auto card = registry_.find_tool(accession);
  if (!card) throw Error(ErrorCode::UnknownTool, "unknown tool " + accession.str(), accession.str());
  if (publication_index >= card->publications.size()) {
    throw Error(ErrorCode::UnknownPublication, "publication #" + std::to_string(publication_index) + " does not exist",
                "publication");
  }
  if (roles.empty()) throw Error(ErrorCode::EmptyRoleSet, "at least one role is required", "roles");
  std::set<CreditRole> parsed;
  for (const auto& r : roles) {
    auto role = parse_credit_role(r);
    if (!role) throw Error(ErrorCode::UnknownRole, "unknown credit role '" + r + "'", "roles");
    parsed.insert(*role);
  }
  const auto& existing = card->publications[publication_index].credit_badges;
  if (auto it = existing.find(std::string(user_id)); it != existing.end()) {
    parsed.insert(it->second.begin(), it->second.end());
  }
  return registry_.set_credit_badges(accession, publication_index, std::string(user_id), parsed);
}

Comment Community::add_comment(std::string_view user_id, const Accession& accession, std::string_view text) {
  std::unique_lock lock(mutex_);
  require_user(user_id);
  require_tool(accession);
  if (text.empty()) throw Error(ErrorCode::MissingField, "comment text is empty", "text");
  Comment c{std::string(user_id), accession, clock_(), std::string(text)};
  store_->append_log("comments", json{{"user_id", c.user_id}, {"accession", accession.str()},
                                      {"at", format_timestamp(c.at)}, {"text", c.text}}
                                     .dump());
  comments_[accession].push_back(c);
  return c;
}

std::vector<Comment> Community::comments(const Accession& accession) const {
  std::shared_lock lock(mutex_);
  auto it = comments_.find(accession);
  return it == comments_.end() ? std::vector<Comment>{} : it->second;
}

void Community::note_tool_updated(const Accession& accession) {
  std::shared_lock lock(mutex_);
  for (const auto& [key, c] : collections_) {
    if (std::find(c.accessions.begin(), c.accessions.end(), accession) == c.accessions.end()) continue;
    store_->append_log("notifications", json{{"user_id", c.owner}, {"accession", accession.str()},
                                             {"collection", c.name}, {"at", format_timestamp(clock_())}}
                                            .dump());
  }
}

std::vector<std::string> Community::notifications() const { return store_->read_log("notifications"); }

}  // namespace toolseek
