package app;

public class Settings {
    private boolean verbose;
    private int level;

    public boolean verbose() {
        return verbose;
    }

    public int level() {
        return level;
    }
    // level = level * 2;
}
