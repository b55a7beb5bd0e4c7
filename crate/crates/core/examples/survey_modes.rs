//! Encounter shares from survey microdata under each respondent subset.
//! Contact-weighted modes drop respondents reporting more than 30 contacts.

use postselect::io::{derive_survey_distribution, read_survey, DataConfig, SurveyMode};

const MICRODATA: &str = "\
race,V11,V13,V21,V30,large_metro
BLACK,1,0,0,3,1
BLACK,0,1,0,1,1
BLACK,0,0,1,45,0
WHITE,0,1,0,1,1
WHITE,0,1,0,2,0
WHITE,1,0,NA,1,1
WHITE,0,0,0,0,1
ASIAN,1,0,0,1,1
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config: DataConfig = serde_json::from_str(r#"{"race_map": {"BLACK": 1, "WHITE": 0}}"#)?;
    let (rows, load) = read_survey(MICRODATA.as_bytes(), &config)?;
    println!("loaded {} respondents, dropped {} of other races", load.loaded, load.dropped);
    for mode in SurveyMode::ALL {
        match derive_survey_distribution(&rows, mode) {
            Ok(dist) => println!("{:<22} p1 = {:.3}", mode.name(), dist.p1("ALL")?),
            Err(e) => println!("{:<22} {e}", mode.name()),
        }
    }
    Ok(())
}
