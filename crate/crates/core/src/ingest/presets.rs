use std::path::Path;

use super::{ColumnMapping, DatasetSpec, FeedbackKind};

pub const PRESET_NAMES: [&str; 9] = [
    "anime",
    "bestbuy",
    "ciaodvd",
    "delicious",
    "filmtrust",
    "jester",
    "lastfm",
    "movielens-1m",
    "retailrocket",
];

/// Column layouts of the public distributions of the benchmark datasets.
/// `path` points at the ratings/events file inside the unpacked archive.
pub fn preset(name: &str, path: impl AsRef<Path>) -> Option<DatasetSpec> {
    let path = path.as_ref().to_path_buf();
    let spec = |columns, delimiter: &str, has_header, feedback, level: Option<&str>| DatasetSpec {
        name: name.to_owned(),
        path: path.clone(),
        columns,
        delimiter: delimiter.to_owned(),
        has_header,
        feedback,
        selected_level: level.map(str::to_owned),
        inclusive_threshold: false,
    };
    let s = match name {
        // rating.csv: user_id,anime_id,rating (-1 = watched without rating)
        "anime" => spec(
            ColumnMapping::new("user_id", "anime_id").with_rating("rating"),
            ",",
            true,
            FeedbackKind::Explicit,
            None,
        ),
        // train.csv: user,sku,category,query,click_time,query_time
        "bestbuy" => spec(
            ColumnMapping::new("user", "sku"),
            ",",
            true,
            FeedbackKind::Implicit,
            None,
        ),
        // movie-ratings.txt: userID,movieID,genreID,reviewID,movieRating,date
        "ciaodvd" => spec(
            ColumnMapping::new(0, 1).with_rating(4),
            ",",
            false,
            FeedbackKind::Explicit,
            None,
        ),
        // user_taggedbookmarks-timestamps.dat: userID bookmarkID tagID timestamp
        "delicious" => spec(
            ColumnMapping::new("userID", "bookmarkID").with_timestamp("timestamp"),
            "\t",
            true,
            FeedbackKind::Implicit,
            None,
        ),
        // ratings.txt: user item rating, space separated, 0.5..4.0
        "filmtrust" => spec(
            ColumnMapping::new(0, 1).with_rating(2),
            "whitespace",
            false,
            FeedbackKind::Explicit,
            None,
        ),
        // jester_ratings.dat: user joke rating (-10..10), whitespace separated
        "jester" => spec(
            ColumnMapping::new(0, 1).with_rating(2),
            "whitespace",
            false,
            FeedbackKind::Explicit,
            None,
        ),
        // user_artists.dat: userID artistID weight (listen counts)
        "lastfm" => spec(
            ColumnMapping::new("userID", "artistID"),
            "\t",
            true,
            FeedbackKind::Implicit,
            None,
        ),
        // ratings.dat: UserID::MovieID::Rating::Timestamp
        "movielens-1m" => spec(
            ColumnMapping::new(0, 1).with_rating(2).with_timestamp(3),
            "::",
            false,
            FeedbackKind::Explicit,
            None,
        ),
        // events.csv: timestamp,visitorid,event,itemid,transactionid
        "retailrocket" => spec(
            ColumnMapping::new("visitorid", "itemid")
                .with_type("event")
                .with_timestamp("timestamp"),
            ",",
            true,
            FeedbackKind::MultiLevel,
            Some("transaction"),
        ),
        _ => return None,
    };
    Some(s)
}
