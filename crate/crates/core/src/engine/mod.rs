//! The activation loop: pick a user, post with probability `p_new`,
//! otherwise read the whole screen and repost what clears the threshold.

mod log;

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::emotions::{sample_emotion, validate_for_run, Emotion, PerEmotion, SimulationConfig, ValidationError};
use crate::graph::{Edge, NetworkGraph, NodeId};
use crate::rng::SimRng;

pub use log::{read_event_log, write_event_log, EventLogError, RunMetadata, EVENT_LOG_HEADER};

pub type MessageId = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub id: MessageId,
    /// Original poster.
    pub author: NodeId,
    pub emotion: Emotion,
    pub born_step: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScreenEntry {
    pub message_id: MessageId,
    /// Followee whose post or repost put the message here.
    pub sender: NodeId,
}

/// Bounded FIFO of received messages, newest at the back.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Screen {
    entries: VecDeque<ScreenEntry>,
}

impl Screen {
    /// Appends `entry` and evicts from the front until at most `capacity` remain.
    pub fn push(&mut self, entry: ScreenEntry, capacity: usize) {
        self.entries.push_back(entry);
        while self.entries.len() > capacity {
            self.entries.pop_front();
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = &ScreenEntry> {
        self.entries.iter()
    }

    pub fn newest(&self) -> Option<&ScreenEntry> {
        self.entries.back()
    }

    fn drain(&mut self) -> VecDeque<ScreenEntry> {
        std::mem::take(&mut self.entries)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PostEvent {
    pub step: u64,
    pub message_id: MessageId,
    pub emotion: Emotion,
    pub author: NodeId,
}

/// A repost by `edge.follower` of a message read from `edge.followee`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RetweetEvent {
    pub step: u64,
    pub message_id: MessageId,
    pub emotion: Emotion,
    /// Original poster of the message.
    pub author: NodeId,
    pub edge: Edge,
    /// Common-friends strength of `edge`.
    pub strength: f64,
}

impl RetweetEvent {
    pub fn reader(&self) -> NodeId {
        self.edge.follower
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Event {
    Post(PostEvent),
    Retweet(RetweetEvent),
}

impl Event {
    pub fn step(&self) -> u64 {
        match self {
            Event::Post(p) => p.step,
            Event::Retweet(r) => r.step,
        }
    }

    pub fn emotion(&self) -> Emotion {
        match self {
            Event::Post(p) => p.emotion,
            Event::Retweet(r) => r.emotion,
        }
    }

    /// The user credited with the message: poster or reposter.
    pub fn actor(&self) -> NodeId {
        match self {
            Event::Post(p) => p.author,
            Event::Retweet(r) => r.edge.follower,
        }
    }

    pub fn as_retweet(&self) -> Option<&RetweetEvent> {
        match self {
            Event::Retweet(r) => Some(r),
            Event::Post(_) => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("no edge {}->{} for a screen entry; screens out of sync with graph", .0.follower, .0.followee)]
    MissingEdge(Edge),
}

/// Repost propensity of a message carried over a tie of the given strength.
#[inline]
pub fn tendency(strength: f64, correlation: f64) -> f64 {
    strength * (correlation - 1.0).exp()
}

/// Mutable state of one run. Owns everything except the shared graph.
#[derive(Debug, Clone)]
pub struct EngineState<'g> {
    graph: &'g NetworkGraph,
    config: SimulationConfig,
    screens: Vec<Screen>,
    messages: Vec<Message>,
    post_counts: Vec<PerEmotion<u64>>,
    events: Vec<Event>,
    edge_retweets: Vec<u32>,
    reposted: Vec<HashSet<MessageId>>,
    rng: SimRng,
    step: u64,
}

impl<'g> EngineState<'g> {
    pub fn new(graph: &'g NetworkGraph, config: SimulationConfig) -> Result<Self, EngineError> {
        validate_for_run(&config)?;
        let n = graph.node_count();
        Ok(EngineState {
            graph,
            config,
            screens: vec![Screen::default(); n],
            messages: Vec::new(),
            post_counts: vec![[0; 4]; n],
            events: Vec::new(),
            edge_retweets: vec![0; graph.edge_count()],
            reposted: vec![HashSet::new(); n],
            rng: SimRng::seed_from_u64(config.seed),
            step: 0,
        })
    }

    pub fn graph(&self) -> &'g NetworkGraph {
        self.graph
    }

    pub fn config(&self) -> &SimulationConfig {
        &self.config
    }

    pub fn screen(&self, u: NodeId) -> &Screen {
        &self.screens[u.index()]
    }

    pub fn screens(&self) -> &[Screen] {
        &self.screens
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    pub fn message(&self, id: MessageId) -> Option<&Message> {
        self.messages.get(id as usize)
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn post_counts(&self) -> &[PerEmotion<u64>] {
        &self.post_counts
    }

    pub fn edge_retweets(&self) -> &[u32] {
        &self.edge_retweets
    }

    pub fn has_reposted(&self, u: NodeId, id: MessageId) -> bool {
        self.reposted[u.index()].contains(&id)
    }

    pub fn current_step(&self) -> u64 {
        self.step
    }

    fn check_node(&self, u: NodeId) -> Result<(), EngineError> {
        if self.graph.contains(u) {
            Ok(())
        } else {
            Err(EngineError::UnknownNode(u))
        }
    }

    /// Places `message_id` on the screen of every follower of `poster`.
    pub fn push_to_followers(&mut self, poster: NodeId, message_id: MessageId) {
        let cap = self.config.screen_size;
        let entry = ScreenEntry {
            message_id,
            sender: poster,
        };
        for &f in self.graph.followers(poster) {
            self.screens[f.index()].push(entry, cap);
        }
    }

    /// `u` posts a new message with a sampled emotion.
    pub fn publish(&mut self, u: NodeId) -> Result<Message, EngineError> {
        self.check_node(u)?;
        let emotion = sample_emotion(&self.config.emotion_params, &mut self.rng);
        let msg = Message {
            id: self.messages.len() as MessageId,
            author: u,
            emotion,
            born_step: self.step,
        };
        self.messages.push(msg);
        self.post_counts[u.index()][emotion.index()] += 1;
        self.events.push(Event::Post(PostEvent {
            step: self.step,
            message_id: msg.id,
            emotion,
            author: u,
        }));
        self.push_to_followers(u, msg.id);
        Ok(msg)
    }

    /// `u` reads and empties its screen, reposting every unseen message
    /// whose tendency over the delivering tie exceeds `tau`.
    /// Returns the reposts made.
    pub fn republish(&mut self, u: NodeId) -> Result<Vec<RetweetEvent>, EngineError> {
        let first = self.events.len();
        self.republish_in_place(u)?;
        Ok(self.events[first..]
            .iter()
            .filter_map(Event::as_retweet)
            .copied()
            .collect())
    }

    fn republish_in_place(&mut self, u: NodeId) -> Result<(), EngineError> {
        self.check_node(u)?;
        let tau = self.config.tau;
        let boost: PerEmotion<f64> = self.config.emotion_params.correlation.map(|c| (c - 1.0).exp());
        for entry in self.screens[u.index()].drain() {
            let msg = self.messages[entry.message_id as usize];
            if msg.author == u || self.reposted[u.index()].contains(&msg.id) {
                continue;
            }
            let edge = Edge {
                follower: u,
                followee: entry.sender,
            };
            let idx = self
                .graph
                .edge_index(u, entry.sender)
                .ok_or(EngineError::MissingEdge(edge))?;
            let strength = self.graph.strengths()[idx];
            if strength * boost[msg.emotion.index()] > tau {
                self.events.push(Event::Retweet(RetweetEvent {
                    step: self.step,
                    message_id: msg.id,
                    emotion: msg.emotion,
                    author: msg.author,
                    edge,
                    strength,
                }));
                self.edge_retweets[idx] += 1;
                self.post_counts[u.index()][msg.emotion.index()] += 1;
                self.reposted[u.index()].insert(msg.id);
                self.push_to_followers(u, msg.id);
            }
        }
        Ok(())
    }

    /// One activation of a uniformly drawn user.
    pub fn step(&mut self) -> Result<(), EngineError> {
        if self.graph.node_count() == 0 {
            self.step += 1;
            return Ok(());
        }
        let u = NodeId(self.rng.index(self.graph.node_count()) as u32);
        if self.rng.bernoulli(self.config.p_new) {
            self.publish(u)?;
        } else {
            self.republish_in_place(u)?;
        }
        self.step += 1;
        Ok(())
    }

    pub fn into_output(self) -> RunOutput {
        RunOutput {
            events: self.events,
            post_counts: self.post_counts,
            edge_retweets: self.edge_retweets,
            message_count: self.messages.len() as u64,
            steps: self.step,
        }
    }
}

/// Everything a completed run leaves behind for the metrics layer.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub events: Vec<Event>,
    pub post_counts: Vec<PerEmotion<u64>>,
    pub edge_retweets: Vec<u32>,
    pub message_count: u64,
    pub steps: u64,
}

impl RunOutput {
    pub fn retweets(&self) -> impl Iterator<Item = &RetweetEvent> {
        self.events.iter().filter_map(Event::as_retweet)
    }

    pub fn post_event_count(&self) -> usize {
        self.events.iter().filter(|e| matches!(e, Event::Post(_))).count()
    }
}

/// Runs `config.steps` activations from a fresh state.
pub fn run(graph: &NetworkGraph, config: &SimulationConfig) -> Result<RunOutput, EngineError> {
    let mut state = EngineState::new(graph, *config)?;
    for _ in 0..config.steps {
        state.step()?;
    }
    Ok(state.into_output())
}
