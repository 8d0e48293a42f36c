use indexmap::IndexMap;
use serde_json::{json, Map, Value};

use crate::FaultFlags;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Player {
    pub nif: String,
    pub first_name: String,
    pub last_name: String,
    pub address: String,
    pub email: String,
    pub phone: String,
}

impl Player {
    pub fn new(nif: &str) -> Self {
        Player {
            nif: nif.to_string(),
            first_name: String::new(),
            last_name: String::new(),
            address: String::new(),
            email: String::new(),
            phone: String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tournament {
    pub id: u64,
    /// `None` only when stored by the faulty insertion.
    pub name: Option<String>,
    pub capacity: i64,
}

/// Failure answered with a status code and a `{"message": ...}` body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiError {
    pub status: u16,
    pub message: String,
}

impl ApiError {
    fn bad_request(message: impl Into<String>) -> Self {
        ApiError { status: 400, message: message.into() }
    }

    fn conflict(message: impl Into<String>) -> Self {
        ApiError { status: 409, message: message.into() }
    }

    fn player_not_found(nif: &str) -> Self {
        ApiError { status: 404, message: format!("Player with NIF {nif} not found.") }
    }

    fn tournament_not_found(id: &str) -> Self {
        ApiError { status: 404, message: format!("Tournament with id {id} not found.") }
    }
}

pub type ApiResult = Result<Value, ApiError>;

/// In-memory state of the tournaments service.
#[derive(Debug, Clone)]
pub struct Store {
    players: IndexMap<String, Player>,
    tournaments: IndexMap<u64, Tournament>,
    /// (tournament, player) pairs in enrollment order.
    enrollments: Vec<(u64, String)>,
    next_id: u64,
    pub faults: FaultFlags,
}

impl Default for Store {
    fn default() -> Self {
        Store::new(FaultFlags::default())
    }
}

impl Store {
    pub fn new(faults: FaultFlags) -> Self {
        Store { players: IndexMap::new(), tournaments: IndexMap::new(), enrollments: Vec::new(), next_id: 1, faults }
    }

    /// Drops every resource and restarts identifiers at 1. Faults stay.
    pub fn reset(&mut self) {
        *self = Store::new(self.faults);
    }

    pub fn players(&self) -> impl Iterator<Item = &Player> {
        self.players.values()
    }

    pub fn tournaments(&self) -> impl Iterator<Item = &Tournament> {
        self.tournaments.values()
    }

    pub fn enrolled(&self, tournament: u64) -> Vec<&str> {
        self.enrollments.iter().filter(|(t, _)| *t == tournament).map(|(_, p)| p.as_str()).collect()
    }

    // Direct state manipulation, bypassing every check.

    pub fn insert_player(&mut self, player: Player) {
        self.players.insert(player.nif.clone(), player);
    }

    pub fn insert_tournament(&mut self, name: &str, capacity: i64) -> u64 {
        let id = self.next_id;
        self.next_id += 1;
        self.tournaments.insert(id, Tournament { id, name: Some(name.to_string()), capacity });
        id
    }

    pub fn enroll(&mut self, tournament: u64, nif: &str) {
        self.enrollments.push((tournament, nif.to_string()));
    }

    // Rendering.

    fn player_fields(p: &Player) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("playerNIF".into(), json!(p.nif));
        m.insert("firstName".into(), json!(p.first_name));
        m.insert("lastName".into(), json!(p.last_name));
        m.insert("address".into(), json!(p.address));
        m.insert("email".into(), json!(p.email));
        m.insert("phone".into(), json!(p.phone));
        m
    }

    fn tournament_fields(&self, t: &Tournament) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("tournamentId".into(), json!(t.id));
        if let Some(name) = &t.name {
            m.insert("tournamentName".into(), json!(name));
        }
        m.insert("capacity".into(), json!(t.capacity));
        m.insert("playerNumber".into(), json!(self.enrolled(t.id).len()));
        m
    }

    pub fn player_json(&self, p: &Player) -> Value {
        let mut m = Self::player_fields(p);
        let tournaments: Vec<Value> = self
            .enrollments
            .iter()
            .filter(|(_, nif)| *nif == p.nif)
            .filter_map(|(t, _)| self.tournaments.get(t))
            .map(|t| {
                let mut summary = self.tournament_fields(t);
                summary.insert("players".into(), json!([]));
                Value::Object(summary)
            })
            .collect();
        m.insert("tournaments".into(), Value::Array(tournaments));
        Value::Object(m)
    }

    pub fn tournament_json(&self, t: &Tournament) -> Value {
        let mut m = self.tournament_fields(t);
        let players: Vec<Value> = self
            .enrolled(t.id)
            .into_iter()
            .filter_map(|nif| self.players.get(nif))
            .map(|p| {
                let mut summary = Self::player_fields(p);
                summary.insert("tournaments".into(), json!([]));
                Value::Object(summary)
            })
            .collect();
        m.insert("players".into(), Value::Array(players));
        Value::Object(m)
    }

    // Lookups.

    fn player(&self, nif: &str) -> Result<&Player, ApiError> {
        self.players.get(nif).ok_or_else(|| ApiError::player_not_found(nif))
    }

    fn tournament_id(&self, raw: &str) -> Result<u64, ApiError> {
        raw.parse::<u64>()
            .ok()
            .filter(|id| self.tournaments.contains_key(id))
            .ok_or_else(|| ApiError::tournament_not_found(raw))
    }

    fn is_enrolled(&self, tournament: u64, nif: &str) -> bool {
        self.enrollments.iter().any(|(t, p)| *t == tournament && p == nif)
    }

    // Players API.

    pub fn list_players(&self) -> ApiResult {
        Ok(Value::Array(self.players.values().map(|p| self.player_json(p)).collect()))
    }

    pub fn create_player(&mut self, body: &Value) -> ApiResult {
        let player = parse_player(body, None)?;
        if self.players.contains_key(&player.nif) {
            return Err(ApiError::conflict(format!("Player with NIF {} already exists.", player.nif)));
        }
        let stored = self.player_json(&player);
        if !self.faults.player_insert_not_stored {
            self.players.insert(player.nif.clone(), player);
        }
        Ok(stored)
    }

    pub fn get_player(&self, nif: &str) -> ApiResult {
        Ok(self.player_json(self.player(nif)?))
    }

    pub fn update_player(&mut self, nif: &str, body: &Value) -> ApiResult {
        self.player(nif)?;
        let player = parse_player(body, Some(nif))?;
        self.players.insert(nif.to_string(), player);
        self.get_player(nif)
    }

    pub fn delete_player(&mut self, nif: &str) -> ApiResult {
        self.player(nif)?;
        let victim = if self.faults.player_delete_wrong_player {
            match self.players.keys().find(|k| *k != nif) {
                Some(other) => other.clone(),
                None => return Ok(self.player_json(&phantom())),
            }
        } else {
            nif.to_string()
        };
        let removed = self.player_json(&self.players[&victim]);
        self.players.shift_remove(&victim);
        self.enrollments.retain(|(_, p)| *p != victim);
        Ok(removed)
    }

    pub fn player_enrollments(&self, nif: &str) -> ApiResult {
        let player = self.player(nif)?;
        Ok(self.player_json(player)["tournaments"].clone())
    }

    // Tournaments API.

    pub fn list_tournaments(&self) -> ApiResult {
        Ok(Value::Array(self.tournaments.values().map(|t| self.tournament_json(t)).collect()))
    }

    pub fn create_tournament(&mut self, body: &Value) -> ApiResult {
        let (name, capacity) = parse_tournament(body)?;
        let id = self.next_id;
        self.next_id += 1;
        let name = (!self.faults.tournament_insert_missing_fields).then_some(name);
        let tournament = Tournament { id, name, capacity };
        let stored = self.tournament_json(&tournament);
        self.tournaments.insert(id, tournament);
        Ok(stored)
    }

    pub fn get_tournament(&self, id: &str) -> ApiResult {
        let id = self.tournament_id(id)?;
        Ok(self.tournament_json(&self.tournaments[&id]))
    }

    pub fn update_tournament(&mut self, raw: &str, body: &Value) -> ApiResult {
        let id = self.tournament_id(raw)?;
        let (name, capacity) = parse_tournament(body)?;
        if (capacity as usize) < self.enrolled(id).len() {
            return Err(ApiError::conflict(format!("Tournament {id} has more enrolled players than {capacity}.")));
        }
        if !self.faults.tournament_update_noop {
            let t = &mut self.tournaments[&id];
            t.name = Some(name);
            t.capacity = capacity;
        }
        self.get_tournament(raw)
    }

    pub fn delete_tournament(&mut self, raw: &str) -> ApiResult {
        let id = self.tournament_id(raw)?;
        let removed = self.tournament_json(&self.tournaments[&id]);
        self.tournaments.shift_remove(&id);
        self.enrollments.retain(|(t, _)| *t != id);
        if self.faults.tournament_delete_returns_null {
            return Ok(Value::Null);
        }
        Ok(removed)
    }

    pub fn capacity(&self, raw: &str) -> ApiResult {
        let id = self.tournament_id(raw)?;
        Ok(json!(self.tournaments[&id].capacity))
    }

    pub fn tournament_enrollments(&self, raw: &str) -> ApiResult {
        let id = self.tournament_id(raw)?;
        Ok(self.tournament_json(&self.tournaments[&id])["players"].clone())
    }

    pub fn enroll_player(&mut self, raw: &str, body: &Value) -> ApiResult {
        let id = self.tournament_id(raw)?;
        let nif = body
            .get("playerNIF")
            .and_then(Value::as_str)
            .ok_or_else(|| ApiError::bad_request("Expected a player with a playerNIF."))?;
        self.player(nif)?;
        if self.is_enrolled(id, nif) {
            return Err(ApiError::conflict(format!(
                "Player with NIF {nif} is already enrolled in the tournament {id}."
            )));
        }
        if self.enrolled(id).len() as i64 >= self.tournaments[&id].capacity {
            return Err(ApiError::conflict(format!("Tournament {id} is full.")));
        }
        self.enrollments.push((id, nif.to_string()));
        self.get_tournament(raw)
    }

    fn enrollment(&self, raw: &str, nif: &str) -> Result<u64, ApiError> {
        let id = self.tournament_id(raw)?;
        self.player(nif)?;
        if !self.is_enrolled(id, nif) {
            return Err(ApiError {
                status: 404,
                message: format!("Player with NIF {nif} is not enrolled in the tournament {id}."),
            });
        }
        Ok(id)
    }

    pub fn get_enrollment(&self, raw: &str, nif: &str) -> ApiResult {
        self.enrollment(raw, nif)?;
        self.get_player(nif)
    }

    pub fn delete_enrollment(&mut self, raw: &str, nif: &str) -> ApiResult {
        if self.faults.enrollment_delete_noop {
            return self.get_tournament(raw);
        }
        let id = self.enrollment(raw, nif)?;
        self.enrollments.retain(|(t, p)| !(*t == id && p == nif));
        self.get_player(nif)
    }
}

fn phantom() -> Player {
    Player {
        nif: "100000000".into(),
        first_name: "Phantom".into(),
        last_name: "Player".into(),
        address: String::new(),
        email: String::new(),
        phone: String::new(),
    }
}

fn text(body: &Value, key: &str) -> Result<String, ApiError> {
    body.get(key)
        .and_then(Value::as_str)
        .map(str::to_string)
        .ok_or_else(|| ApiError::bad_request(format!("Field '{key}' must be a string.")))
}

fn parse_player(body: &Value, nif: Option<&str>) -> Result<Player, ApiError> {
    if !body.is_object() {
        return Err(ApiError::bad_request("Expected a player object."));
    }
    let player = Player {
        nif: text(body, "playerNIF")?,
        first_name: text(body, "firstName")?,
        last_name: text(body, "lastName")?,
        address: text(body, "address")?,
        email: text(body, "email")?,
        phone: text(body, "phone")?,
    };
    let valid = player.nif.len() == 9 && player.nif.bytes().all(|b| b.is_ascii_digit());
    if !valid {
        return Err(ApiError::bad_request(format!("Invalid NIF {}.", player.nif)));
    }
    match nif {
        Some(nif) if nif != player.nif => Err(ApiError::bad_request("The NIF of a player cannot change.")),
        _ => Ok(player),
    }
}

fn parse_tournament(body: &Value) -> Result<(String, i64), ApiError> {
    if !body.is_object() {
        return Err(ApiError::bad_request("Expected a tournament object."));
    }
    let name = text(body, "tournamentName")?;
    let capacity = body
        .get("capacity")
        .and_then(Value::as_i64)
        .filter(|c| *c >= 1)
        .ok_or_else(|| ApiError::bad_request("Field 'capacity' must be a positive integer."))?;
    Ok((name, capacity))
}
