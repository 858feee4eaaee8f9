#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "toolseek/model.hpp"
#include "toolseek/registry.hpp"
#include "toolseek/store.hpp"

namespace toolseek {

struct User {
  UserId user_id;
  std::string display_name;
  std::optional<std::string> biography;
  std::optional<std::string> affiliation;
  std::set<Role> roles{Role::Member};
  // Opaque profile links (ORCID, Twitter); never dereferenced.
  std::map<std::string, std::string> profile_links;

  bool operator==(const User&) const = default;
};

struct Review {
  UserId user_id;
  Accession accession;
  int rating = 0;
  std::string text;
  Timestamp at{};

  bool operator==(const Review&) const = default;
};

// Trail left when a user replaces an earlier review of the same tool.
struct ReviewReplacement {
  UserId user_id;
  Accession accession;
  Timestamp at{};
  int old_rating = 0;
  int new_rating = 0;
  std::string old_text;
  std::string new_text;
};

struct Collection {
  UserId owner;
  std::string name;
  std::vector<Accession> accessions;
  bool shared = false;

  bool operator==(const Collection&) const = default;
};

struct Comment {
  UserId user_id;
  Accession accession;
  Timestamp at{};
  std::string text;
};

struct RatingAggregate {
  std::optional<double> mean;  // undefined with no reviews
  std::size_t count = 0;
};

nlohmann::json user_to_json(const User& user);
// Unknown roles are dropped.
User user_from_json(const nlohmann::json& doc);
nlohmann::json review_to_json(const Review& review);
Review review_from_json(const nlohmann::json& doc);
nlohmann::json collection_to_json(const Collection& collection);
Collection collection_from_json(const nlohmann::json& doc);
nlohmann::json comment_to_json(const Comment& comment);

enum class BookmarkAction { Add, Remove };

class Community {
 public:
  using RatingListener = std::function<void(const Accession&)>;

  Community(Registry& registry, std::shared_ptr<DocumentStore> store, Clock clock = system_now);

  // Creates or replaces a profile.
  User register_user(User user);
  std::optional<User> find_user(std::string_view user_id) const;

  Review add_review(std::string_view user_id, const Accession& accession, int rating, std::string_view text);
  RatingAggregate aggregate_rating(const Accession& accession) const;
  RatingSummary rating_summary(const Accession& accession) const;
  std::vector<Review> reviews(const Accession& accession) const;
  std::vector<ReviewReplacement> review_history(const Accession& accession) const;

  Collection manage_bookmark(std::string_view user_id, const Accession& accession, std::string_view collection_name,
                             BookmarkAction action);
  void delete_collection(std::string_view user_id, std::string_view collection_name);
  std::vector<Collection> collections(std::string_view user_id) const;

  // Merges `roles` into the user's badges on the given publication.
  Publication assign_credit(std::string_view user_id, const Accession& accession, std::size_t publication_index,
                            const std::vector<std::string>& roles);

  Comment add_comment(std::string_view user_id, const Accession& accession, std::string_view text);
  std::vector<Comment> comments(const Accession& accession) const;

  // Records a notification event for every owner bookmarking the tool.
  void note_tool_updated(const Accession& accession);
  std::vector<std::string> notifications() const;

  void set_rating_listener(RatingListener listener);

 private:
  void require_user(std::string_view user_id) const;
  void require_tool(const Accession& accession) const;
  void persist_collection(const Collection& c);

  Registry& registry_;
  std::shared_ptr<DocumentStore> store_;
  Clock clock_;

  mutable std::shared_mutex mutex_;
  std::map<UserId, User, std::less<>> users_;
  std::map<Accession, std::map<UserId, Review>> reviews_;
  std::map<Accession, std::vector<ReviewReplacement>> replacements_;
  std::map<std::pair<UserId, std::string>, Collection> collections_;
  std::map<Accession, std::vector<Comment>> comments_;
  RatingListener rating_listener_;
};

}  // namespace toolseek
