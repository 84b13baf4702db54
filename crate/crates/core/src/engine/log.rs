use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Event, PostEvent, RetweetEvent};
use crate::emotions::{ConfigFile, Emotion};
use crate::graph::{Edge, NodeId};

pub const EVENT_LOG_HEADER: [&str; 8] = [
    "step", "type", "msg_id", "emotion", "author", "reader", "followee", "strength",
];

#[derive(Debug, Error)]
pub enum EventLogError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("event log row {row}: {message}")]
    Row { row: usize, message: String },
}

/// Writes the log as CSV. Post rows leave reader, followee and strength empty.
pub fn write_event_log<W: Write>(events: &[Event], writer: W) -> Result<(), EventLogError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(EVENT_LOG_HEADER)?;
    for ev in events {
        match ev {
            Event::Post(p) => w.write_record([
                p.step.to_string().as_str(),
                "post",
                &p.message_id.to_string(),
                p.emotion.as_str(),
                &p.author.to_string(),
                "",
                "",
                "",
            ])?,
            Event::Retweet(r) => w.write_record([
                r.step.to_string().as_str(),
                "retweet",
                &r.message_id.to_string(),
                r.emotion.as_str(),
                &r.author.to_string(),
                &r.edge.follower.to_string(),
                &r.edge.followee.to_string(),
                &format!("{:.6}", r.strength),
            ])?,
        }
    }
    w.flush()?;
    Ok(())
}

/// Parses a log written by [`write_event_log`]. Strengths come back at the
/// printed six-decimal precision.
pub fn read_event_log<R: Read>(reader: R) -> Result<Vec<Event>, EventLogError> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = r.headers()?.clone();
    if header.iter().ne(EVENT_LOG_HEADER) {
        return Err(EventLogError::Row {
            row: 0,
            message: format!("unexpected header {:?}", header.iter().collect::<Vec<_>>()),
        });
    }
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        let err = |message: String| EventLogError::Row { row, message };
        let field = |k: usize| rec.get(k).unwrap_or("");
        let num = |k: usize| -> Result<u64, EventLogError> {
            field(k)
                .parse::<u64>()
                .map_err(|_| err(format!("bad {} {:?}", EVENT_LOG_HEADER[k], field(k))))
        };
        let node = |k: usize| -> Result<NodeId, EventLogError> {
            let v = num(k)?;
            u32::try_from(v)
                .map(NodeId)
                .map_err(|_| err(format!("node id {v} out of range")))
        };
        let step = num(0)?;
        let message_id = num(2)?;
        let emotion: Emotion = field(3).parse().map_err(err)?;
        let author = node(4)?;
        match field(1) {
            "post" => out.push(Event::Post(PostEvent {
                step,
                message_id,
                emotion,
                author,
            })),
            "retweet" => {
                let strength = field(7)
                    .parse::<f64>()
                    .map_err(|_| err(format!("bad strength {:?}", field(7))))?;
                out.push(Event::Retweet(RetweetEvent {
                    step,
                    message_id,
                    emotion,
                    author,
                    edge: Edge {
                        follower: node(5)?,
                        followee: node(6)?,
                    },
                    strength,
                }));
            }
            other => return Err(err(format!("unknown event type {other:?}"))),
        }
    }
    Ok(out)
}

/// Companion record of how an event log was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub config: ConfigFile,
    pub seed: u64,
    pub graph_hash: String,
    pub node_count: usize,
    pub edge_count: usize,
    pub rng_algorithm: String,
    pub steps: u64,
    pub posts: u64,
    pub retweets: u64,
    pub wall_clock_ms: u128,
}
