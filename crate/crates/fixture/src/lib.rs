//! In-process implementation of the tournaments service with switchable
//! faults, plus the annotated specification document describing it.

mod server;
mod store;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use server::FixtureServer;
pub use store::{ApiError, ApiResult, Player, Store, Tournament};

/// Annotated OpenAPI document of the service. Its server URL is
/// `http://localhost:8080`; see [`spec_with_base_url`].
pub const TOURNAMENTS_SPEC: &str = include_str!("../assets/tournaments.json");

/// The bundled document with its server URL replaced.
pub fn spec_with_base_url(base_url: &str) -> String {
    let mut doc: serde_json::Value = serde_json::from_str(TOURNAMENTS_SPEC).expect("bundled spec is valid JSON");
    doc["servers"] = serde_json::json!([{ "url": base_url }]);
    serde_json::to_string_pretty(&doc).expect("serializable")
}

/// Fault switches. All false is the correct service.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FaultFlags {
    /// DELETE /tournaments/{id} removes the tournament but answers `null`.
    pub tournament_delete_returns_null: bool,
    /// DELETE of an enrollment answers 200 and keeps the enrollment.
    pub enrollment_delete_noop: bool,
    /// POST /tournaments stores the tournament without its name.
    pub tournament_insert_missing_fields: bool,
    /// PUT /tournaments/{id} leaves the tournament unchanged.
    pub tournament_update_noop: bool,
    /// POST /players answers 200 without storing the player.
    pub player_insert_not_stored: bool,
    /// DELETE /players/{nif} removes the oldest other player instead.
    pub player_delete_wrong_player: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Fault {
    TournamentDeleteReturnsNull,
    EnrollmentDeleteNoop,
    TournamentInsertMissingFields,
    TournamentUpdateNoop,
    PlayerInsertNotStored,
    PlayerDeleteWrongPlayer,
}

impl Fault {
    pub const ALL: [Fault; 6] = [
        Fault::PlayerInsertNotStored,
        Fault::PlayerDeleteWrongPlayer,
        Fault::TournamentInsertMissingFields,
        Fault::TournamentUpdateNoop,
        Fault::TournamentDeleteReturnsNull,
        Fault::EnrollmentDeleteNoop,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Fault::TournamentDeleteReturnsNull => "tournament-delete-returns-null",
            Fault::EnrollmentDeleteNoop => "enrollment-delete-noop",
            Fault::TournamentInsertMissingFields => "tournament-insert-missing-fields",
            Fault::TournamentUpdateNoop => "tournament-update-noop",
            Fault::PlayerInsertNotStored => "player-insert-not-stored",
            Fault::PlayerDeleteWrongPlayer => "player-delete-wrong-player",
        }
    }

    /// The operation whose implementation the fault breaks.
    pub fn operation(self) -> (&'static str, &'static str) {
        match self {
            Fault::TournamentDeleteReturnsNull => ("DELETE", "/tournaments/{tournamentId}"),
            Fault::EnrollmentDeleteNoop => ("DELETE", "/tournaments/{tournamentId}/enrollments/{playerNIF}"),
            Fault::TournamentInsertMissingFields => ("POST", "/tournaments"),
            Fault::TournamentUpdateNoop => ("PUT", "/tournaments/{tournamentId}"),
            Fault::PlayerInsertNotStored => ("POST", "/players"),
            Fault::PlayerDeleteWrongPlayer => ("DELETE", "/players/{playerNIF}"),
        }
    }

    pub fn enable(self, flags: &mut FaultFlags) {
        let field = match self {
            Fault::TournamentDeleteReturnsNull => &mut flags.tournament_delete_returns_null,
            Fault::EnrollmentDeleteNoop => &mut flags.enrollment_delete_noop,
            Fault::TournamentInsertMissingFields => &mut flags.tournament_insert_missing_fields,
            Fault::TournamentUpdateNoop => &mut flags.tournament_update_noop,
            Fault::PlayerInsertNotStored => &mut flags.player_insert_not_stored,
            Fault::PlayerDeleteWrongPlayer => &mut flags.player_delete_wrong_player,
        };
        *field = true;
    }
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Fault {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Fault::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| {
            let names: Vec<_> = Fault::ALL.iter().map(|f| f.name()).collect();
            format!("unknown fault '{s}', expected one of: {}", names.join(", "))
        })
    }
}

impl FaultFlags {
    pub fn only(fault: Fault) -> Self {
        let mut flags = FaultFlags::default();
        fault.enable(&mut flags);
        flags
    }
}

impl FromIterator<Fault> for FaultFlags {
    fn from_iter<I: IntoIterator<Item = Fault>>(iter: I) -> Self {
        let mut flags = FaultFlags::default();
        for fault in iter {
            fault.enable(&mut flags);
        }
        flags
    }
}
