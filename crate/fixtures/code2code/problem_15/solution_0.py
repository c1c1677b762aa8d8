def above(flights, limit):
    return [flight for flight in flights if flight.volume > limit]
