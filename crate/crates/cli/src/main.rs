fn main() {
    // placeholder entry point; subcommands are wired up once the
    // experiment modules land
    eprintln!("htype: experiment driver not yet wired");
    std::process::exit(2);
}
