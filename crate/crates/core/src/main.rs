fn main() {
    std::process::exit(emotion_contagion::cli::main_with_args(std::env::args_os()));
}
