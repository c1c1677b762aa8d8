def max_capacity(flights):
    return max(flight.capacity for flight in flights)
