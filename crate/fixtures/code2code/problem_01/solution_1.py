def sum_age(tickets):
    return sum(ticket.age for ticket in tickets)
