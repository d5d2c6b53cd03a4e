public class Util {
    public static String percent(double value) {
        return Math.round(value * 100) + "%";
    }
}
