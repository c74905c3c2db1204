use std::path::Path;

use thiserror::Error;

use crate::{caps, Game};

/// Errors from the explicit game-file format.
#[derive(Debug, Error)]
pub enum GameFileError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("player count {0} outside 1..={max}", max = caps::MAX_PLAYERS)]
    BadPlayerCount(usize),
    #[error("line {line}: mask {mask:#x} has members outside 0..{n}")]
    MaskOutOfRange { line: usize, mask: u32, n: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Parse an explicit game.
///
/// The format is line based: `#` starts a comment, the first data line is the
/// player count, and each following data line is `<coalition mask in hex>
/// <utility>`. Subsets not listed default to utility 0.
pub fn parse_game_file(text: &str) -> Result<Game, GameFileError> {
    let mut n: Option<usize> = None;
    let mut entries: Vec<(u32, f64)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match n {
            None => {
                let count: usize = line.parse().map_err(|_| GameFileError::Parse {
                    line: line_no,
                    message: format!("expected the player count, found {:?}", line),
                })?;
                if count == 0 || count > caps::MAX_PLAYERS {
                    return Err(GameFileError::BadPlayerCount(count));
                }
                n = Some(count);
            }
            Some(players) => {
                let mut parts = line.split_whitespace();
                let mask_text = parts.next().ok_or_else(|| GameFileError::Parse {
                    line: line_no,
                    message: "missing coalition mask".into(),
                })?;
                let value_text = parts.next().ok_or_else(|| GameFileError::Parse {
                    line: line_no,
                    message: "missing utility value".into(),
                })?;
                if parts.next().is_some() {
                    return Err(GameFileError::Parse {
                        line: line_no,
                        message: "trailing tokens after utility".into(),
                    });
                }
                let mask_text = mask_text
                    .strip_prefix("0x")
                    .or_else(|| mask_text.strip_prefix("0X"))
                    .unwrap_or(mask_text);
                let mask =
                    u32::from_str_radix(mask_text, 16).map_err(|_| GameFileError::Parse {
                        line: line_no,
                        message: format!("invalid hex mask {:?}", mask_text),
                    })?;
                if u64::from(mask) >= (1u64 << players) {
                    return Err(GameFileError::MaskOutOfRange {
                        line: line_no,
                        mask,
                        n: players,
                    });
                }
                let value: f64 = value_text.parse().map_err(|_| GameFileError::Parse {
                    line: line_no,
                    message: format!("invalid utility {:?}", value_text),
                })?;
                entries.push((mask, value));
            }
        }
    }

    let n = n.ok_or(GameFileError::Parse {
        line: 0,
        message: "empty game file".into(),
    })?;
    Ok(Game::from_table(n, &entries))
}

pub fn load_game_file(path: impl AsRef<Path>) -> Result<Game, GameFileError> {
    let text = std::fs::read_to_string(path)?;
    parse_game_file(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{shapley_exact, Coalition};

    #[test]
    fn parses_glove_game() {
        let text = "\
# glove game
3
3 1.0    # {0,1}
0x5 1.0  # {0,2}
7 1.0
";
        let g = parse_game_file(text).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.v(Coalition::from_mask(3, 0b011)), 1.0);
        assert_eq!(g.v(Coalition::from_mask(3, 0b001)), 0.0);
        let phi = shapley_exact(&g).unwrap();
        assert!((phi.get(0) - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_out_of_range_mask() {
        let text = "2\nff 1.0\n";
        assert!(matches!(
            parse_game_file(text),
            Err(GameFileError::MaskOutOfRange { mask: 0xff, .. })
        ));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_game_file("").is_err());
        assert!(parse_game_file("three\n").is_err());
        assert!(parse_game_file("2\nzz 1.0\n").is_err());
        assert!(parse_game_file("2\n1\n").is_err());
    }
}
