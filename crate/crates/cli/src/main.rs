use std::io::{BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use fcn_cli::{Flow, Shell};

/// Physical design for field-coupled nanocomputing.
///
/// Without -f or -c, commands are read from standard input.
#[derive(Parser, Debug)]
#[command(name = "fcn", version)]
struct Cli {
    /// Run the commands in a script file.
    #[arg(short = 'f', long = "file", conflicts_with = "commands")]
    script: Option<PathBuf>,
    /// Run a semicolon-separated list of commands.
    #[arg(short = 'c', long = "commands")]
    commands: Option<String>,
    /// Write a JSON log of all executed commands on exit.
    #[arg(short = 'l', long = "log")]
    log: Option<PathBuf>,
}

fn interactive(shell: &mut Shell) -> Result<(), fcn_cli::ShellError> {
    let stdin = std::io::stdin();
    let mut stdout = std::io::stdout();
    let _ = write!(stdout, "fcn> ");
    let _ = stdout.flush();
    for line in stdin.lock().lines() {
        let line = line?;
        match shell.execute(&line) {
            Ok((Flow::Quit, text)) => {
                print!("{text}");
                break;
            }
            Ok((Flow::Continue, text)) => print!("{text}"),
            Err(e) => eprintln!("error: {e}"),
        }
        let _ = write!(stdout, "fcn> ");
        let _ = stdout.flush();
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let mut shell = Shell::new(".");
    let mut stdout = std::io::stdout();
    let result = match (&cli.script, &cli.commands) {
        (Some(path), _) => shell.run_script(path, &mut stdout),
        (None, Some(cmds)) => shell.run_inline(cmds, &mut stdout),
        (None, None) => interactive(&mut shell),
    };
    if let Some(log) = &cli.log {
        if let Err(e) = shell.log.write(log) {
            eprintln!("error: cannot write log {}: {e}", log.display());
            return ExitCode::from(1);
        }
    }
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
